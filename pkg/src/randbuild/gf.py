"""
Finite fields GF(p^k) in the polynomial basis.

Elements are coefficient tuples (low-to-high) modulo a fixed monic
irreducible polynomial.  Each element also has an integer index
``sum(c_i * p**i)``; the index order is the canonical enumeration order
(zero first, then one, ...) and is what the lookup tables use.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np

MAX_ORDER = 1 << 20


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, k) with q == p**k, or None if q is not a prime power."""
    if q < 2:
        return None
    p = 2
    while p * p <= q and q % p:
        p += 1
    if q % p:
        p = q
    k, r = 0, q
    while r % p == 0:
        r //= p
        k += 1
    return (p, k) if r == 1 else None


# -- polynomials over F_p: coefficient lists low-to-high, no trailing zeros --

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    inv_lead = pow(m[-1], p - 2, p)
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _trim(a)
    return a


def poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _monic_polys(p: int, d: int):
    """Monic degree-d polynomials in lex order of coefficients read high-to-low."""
    for tail in product(range(p), repeat=d):
        # tail is (c_{d-1}, ..., c_0)
        yield list(reversed(tail)) + [1]


def is_irreducible(f: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg(f)//2."""
    d = len(f) - 1
    if d < 1:
        return False
    for e in range(1, d // 2 + 1):
        for g in _monic_polys(p, e):
            if not poly_mod(list(f), g, p):
                return False
    return True


def find_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lex-smallest (high-to-low) monic irreducible of degree k over F_p.

    >>> find_irreducible(2, 2)
    (1, 1, 1)
    >>> find_irreducible(3, 2)
    (1, 0, 1)
    """
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if k < 1:
        raise ValueError(f"degree must be >= 1, got {k}")
    if p ** k > MAX_ORDER:
        raise ValueError(f"field order {p}^{k} exceeds cap {MAX_ORDER}")
    for f in _monic_polys(p, k):
        if is_irreducible(f, p):
            return tuple(f)
    raise AssertionError("unreachable: irreducibles exist in every degree")


@dataclass(frozen=True)
class GfParams:
    p: int
    k: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.p ** self.k > MAX_ORDER:
            raise ValueError("field order exceeds cap")
        if len(self.modulus) != self.k + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree k")
        if not is_irreducible(list(self.modulus), self.p):
            raise ValueError(f"modulus {self.modulus} is reducible over F_{self.p}")

    @classmethod
    def canonical(cls, p: int, k: int = 1) -> "GfParams":
        return cls(p, k, find_irreducible(p, k))

    @classmethod
    def of_order(cls, q: int) -> "GfParams":
        pk = prime_power(q)
        if pk is None:
            raise ValueError(f"q={q} is not a prime power")
        return cls.canonical(*pk)

    @property
    def order(self) -> int:
        return self.p ** self.k


@dataclass(frozen=True)
class GfElem:
    coeffs: tuple[int, ...]
    params: GfParams = field(repr=False)

    def __post_init__(self):
        if len(self.coeffs) != self.params.k:
            raise ValueError("coefficient vector must have length k")
        if any(not 0 <= c < self.params.p for c in self.coeffs):
            raise ValueError("coefficients must lie in [0, p)")

    @property
    def index(self) -> int:
        p = self.params.p
        return sum(c * p ** i for i, c in enumerate(self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other: "GfElem") -> "GfElem":
        return gf_add(self, other)

    def __sub__(self, other: "GfElem") -> "GfElem":
        return gf_add(self, gf_neg(other))

    def __neg__(self) -> "GfElem":
        return gf_neg(self)

    def __mul__(self, other: "GfElem") -> "GfElem":
        return gf_mul(self, other)

    def __truediv__(self, other: "GfElem") -> "GfElem":
        return gf_mul(self, gf_inv(other))

    def __pow__(self, e: int) -> "GfElem":
        return gf_pow(self, e)

    def __str__(self) -> str:
        terms = []
        for i in reversed(range(len(self.coeffs))):
            c = self.coeffs[i]
            if not c:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if not mono:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}{mono}")
        return " + ".join(terms) or "0"


def _check_same(a: GfElem, b: GfElem) -> None:
    if a.params != b.params:
        raise ValueError("elements belong to different fields")


def _elem(coeffs: list[int], params: GfParams) -> GfElem:
    return GfElem(tuple(coeffs) + (0,) * (params.k - len(coeffs)), params)


def gf_add(a: GfElem, b: GfElem) -> GfElem:
    _check_same(a, b)
    p = a.params.p
    return GfElem(tuple((x + y) % p for x, y in zip(a.coeffs, b.coeffs)), a.params)


def gf_neg(a: GfElem) -> GfElem:
    p = a.params.p
    return GfElem(tuple((-x) % p for x in a.coeffs), a.params)


def gf_mul(a: GfElem, b: GfElem) -> GfElem:
    _check_same(a, b)
    prm = a.params
    prod = poly_mul(_trim(list(a.coeffs)), _trim(list(b.coeffs)), prm.p)
    return _elem(poly_mod(prod, list(prm.modulus), prm.p), prm)


def gf_pow(a: GfElem, e: int) -> GfElem:
    if e < 0:
        return gf_pow(gf_inv(a), -e)
    result = _elem([1], a.params)
    base = a
    while e:
        if e & 1:
            result = gf_mul(result, base)
        base = gf_mul(base, base)
        e >>= 1
    return result


def gf_inv(a: GfElem) -> GfElem:
    if a.is_zero():
        raise ZeroDivisionError("inverse of zero in GF(q)")
    # a^(Q-2) = a^-1 in a field of order Q
    return gf_pow(a, a.params.order - 2)


def enumerate_field(params: GfParams) -> list[GfElem]:
    """All Q elements in index order: zero first, then one, ..."""
    p, k = params.p, params.k
    out = []
    for n in range(params.order):
        coeffs = []
        for _ in range(k):
            coeffs.append(n % p)
            n //= p
        out.append(GfElem(tuple(coeffs), params))
    return out


class GF:
    """Table-driven view of GF(q) on integer indices.

    Geometry and ring code work on indices in ``range(q)`` for speed; the
    tables are built once from the polynomial arithmetic above.
    """

    def __init__(self, q_or_params: int | GfParams):
        if isinstance(q_or_params, GfParams):
            self.params = q_or_params
        else:
            self.params = GfParams.of_order(q_or_params)
        self.q = self.params.order
        self.p = self.params.p

    def __repr__(self) -> str:
        return f"GF({self.q})"

    @cached_property
    def elements(self) -> list[GfElem]:
        return enumerate_field(self.params)

    @cached_property
    def add_table(self) -> np.ndarray:
        els = self.elements
        return np.array([[gf_add(a, b).index for b in els] for a in els], dtype=np.int64)

    @cached_property
    def mul_table(self) -> np.ndarray:
        els = self.elements
        return np.array([[gf_mul(a, b).index for b in els] for a in els], dtype=np.int64)

    @cached_property
    def neg_table(self) -> np.ndarray:
        return np.array([gf_neg(a).index for a in self.elements], dtype=np.int64)

    @cached_property
    def inv_table(self) -> np.ndarray:
        # inv_table[0] is a sentinel; callers must not invert zero
        inv = [0] + [gf_inv(a).index for a in self.elements[1:]]
        return np.array(inv, dtype=np.int64)

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self.add_table[a, self.neg_table[b]])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(q)")
        return int(self.inv_table[a])
