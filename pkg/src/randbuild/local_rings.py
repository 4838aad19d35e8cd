"""
Finite local rings F_q[y]/(f^s) and 3x3 matrix groups over them.

Ring elements are encoded as integers: the reduced representative
``c_0 + c_1 y + ... + c_{D-1} y^{D-1}`` (D = s * deg f, each c_i an index
into GF(q)) maps to ``sum c_i q^i``.  Group code works on numpy arrays of
these codes through addition/multiplication tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .density import ceil_log, make_rng
from .gf import GF, GfParams, prime_power

TABLE_CAP = 1024
ENUM_CAP = 1 << 16
PGL_EXHAUSTIVE_CAP = 6000


# -- polynomials over GF(q) on index coefficients ----------------------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def pmul(F: GF, a: list[int], b: list[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
    return _trim(out)


def padd(F: GF, a: list[int], b: list[int]) -> list[int]:
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return _trim([F.add(x, y) for x, y in zip(a, b)])


def pneg(F: GF, a: list[int]) -> list[int]:
    return [int(F.neg_table[x]) for x in a]


def pdivmod(F: GF, a: list[int], m: list[int]) -> tuple[list[int], list[int]]:
    a = _trim(list(a))
    m = _trim(list(m))
    if not m:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = F.inv(m[-1])
    quot = [0] * max(len(a) - len(m) + 1, 0)
    while len(a) >= len(m):
        c = F.mul(a[-1], inv_lead)
        shift = len(a) - len(m)
        quot[shift] = c
        for i, mi in enumerate(m):
            a[shift + i] = F.sub(a[shift + i], F.mul(c, mi))
        _trim(a)
    return _trim(quot), a


def pmod(F: GF, a: list[int], m: list[int]) -> list[int]:
    return pdivmod(F, a, m)[1]


def ppow(F: GF, a: list[int], e: int) -> list[int]:
    out = [1]
    for _ in range(e):
        out = pmul(F, out, a)
    return out


def pirreducible(F: GF, f: list[int]) -> bool:
    """Trial division by monic polynomials of degree <= deg f / 2."""
    d = len(f) - 1
    if d < 1:
        return False
    q = F.q
    for e in range(1, d // 2 + 1):
        for n in range(q ** e):
            g = [(n // q ** i) % q for i in range(e)] + [1]
            if not pmod(F, f, g):
                return False
    return True


def parse_poly(text: str, F: GF) -> list[int]:
    """Parse e.g. "y^2+y+1" or "y+2" (coefficients as GF indices)."""
    terms = text.replace(" ", "").replace("-", "+-").split("+")
    coeffs: dict[int, int] = {}
    for t in terms:
        if not t:
            continue
        sign = 1
        if t.startswith("-"):
            sign, t = -1, t[1:]
        if "y" in t:
            c, _, e = t.partition("y")
            c = int(c.rstrip("*")) if c.rstrip("*") else 1
            e = int(e[1:]) if e.startswith("^") else 1
        else:
            c, e = int(t), 0
        if c >= F.q:
            raise ValueError(f"coefficient {c} not a GF({F.q}) index")
        if sign < 0:
            c = int(F.neg_table[c])
        coeffs[e] = F.add(coeffs.get(e, 0), c)
    deg = max(coeffs) if coeffs else 0
    return _trim([coeffs.get(i, 0) for i in range(deg + 1)])


# -- rings -------------------------------------------------------------------

@dataclass(frozen=True)
class LocalRingParams:
    """F_q[y]/(f^s), f monic irreducible with f(0) != 0 and f(-1) != 0."""

    q: int
    f: tuple[int, ...]
    s: int

    def __post_init__(self):
        if prime_power(self.q) is None:
            raise ValueError(f"q={self.q} is not a prime power")
        if self.s < 1:
            raise ValueError("s must be >= 1")
        F = GF(self.q)
        f = list(self.f)
        if _trim(list(f)) != f or len(f) < 2 or f[-1] != 1:
            raise ValueError("f must be monic of degree >= 1")
        if not pirreducible(F, f):
            raise ValueError("f is reducible")
        if f[0] == 0:
            raise ValueError("f is not coprime to y")
        if not pmod(F, f, [1, 1]):
            raise ValueError("f is not coprime to y+1")

    @property
    def degree(self) -> int:
        return len(self.f) - 1

    @property
    def Q(self) -> int:
        return self.q ** self.degree


class LocalRing:
    """Arithmetic in F_q[y]/(f^s) on integer codes."""

    def __init__(self, q: int, f, s: int, *, check: bool = True):
        if check:
            params = LocalRingParams(q, tuple(f), s)
            q, f, s = params.q, list(params.f), params.s
        self.F = GF(q)
        self.q = q
        self.f = list(f)
        self.s = s
        self.d = len(self.f) - 1
        self.D = self.d * s
        self.Q = q ** self.d
        self.size = q ** self.D
        self.modulus = ppow(self.F, self.f, s)

    @classmethod
    def from_params(cls, params: LocalRingParams) -> "LocalRing":
        return cls(params.q, params.f, params.s)

    @classmethod
    def truncated(cls, Q: int, s: int) -> "LocalRing":
        """F_Q[t]/(t^s): the local ring with residue field of order Q and length s.

        Every F_q[y]/(f^s) with q^deg f = Q is isomorphic to it; it is the
        model used when only (Q, s) is given.
        """
        return cls(Q, [0, 1], s, check=False)

    def __repr__(self) -> str:
        return f"LocalRing(q={self.q}, f={self.f}, s={self.s})"

    # encoding
    def decode(self, x: int) -> list[int]:
        q = self.q
        return _trim([(x // q ** i) % q for i in range(self.D)])

    def encode(self, poly: list[int]) -> int:
        poly = pmod(self.F, poly, self.modulus)
        return sum(c * self.q ** i for i, c in enumerate(poly))

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def ring_add(self, a: int, b: int) -> int:
        return self.encode(padd(self.F, self.decode(a), self.decode(b)))

    def ring_neg(self, a: int) -> int:
        return self.encode(pneg(self.F, self.decode(a)))

    def ring_mul(self, a: int, b: int) -> int:
        return self.encode(pmul(self.F, self.decode(a), self.decode(b)))

    def ring_pow(self, a: int, e: int) -> int:
        out, base = 1, a
        while e:
            if e & 1:
                out = self.ring_mul(out, base)
            base = self.ring_mul(base, base)
            e >>= 1
        return out

    def is_unit(self, a: int) -> bool:
        return bool(pmod(self.F, self.decode(a), self.f))

    def residue(self, a: int) -> int:
        """Image in the residue field, coded as an element of F_q[y]/(f)."""
        poly = pmod(self.F, self.decode(a), self.f)
        return sum(c * self.q ** i for i, c in enumerate(poly))

    def ring_inv(self, a: int) -> int:
        """Inverse via the extended Euclidean algorithm against f^s."""
        if not self.is_unit(a):
            raise ZeroDivisionError(f"{a} is not a unit")
        F = self.F
        r0, r1 = self.modulus, self.decode(a)
        s0, s1 = [], [1]
        while r1:
            quot, rem = pdivmod(F, r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, padd(F, s0, pneg(F, pmul(F, quot, s1)))
        # r0 is a nonzero constant
        c = F.inv(r0[0])
        return self.encode(pmul(F, s0, [c]))

    def units(self) -> list[int]:
        return [x for x in range(self.size) if self.is_unit(x)]

    def maximal_ideal(self) -> list[int]:
        return [x for x in range(self.size) if not self.is_unit(x)]

    # tables
    def _check_tables(self):
        if self.size > TABLE_CAP:
            raise ValueError(f"ring of size {self.size} too large for tables")

    @cached_property
    def add_table(self) -> np.ndarray:
        self._check_tables()
        n = self.size
        return np.array([[self.ring_add(a, b) for b in range(n)] for a in range(n)], dtype=np.int64)

    @cached_property
    def mul_table(self) -> np.ndarray:
        self._check_tables()
        n = self.size
        return np.array([[self.ring_mul(a, b) for b in range(n)] for a in range(n)], dtype=np.int64)

    @cached_property
    def neg_table(self) -> np.ndarray:
        return np.array([self.ring_neg(a) for a in range(self.size)], dtype=np.int64)

    @cached_property
    def inv_table(self) -> np.ndarray:
        # non-units map to 0, never used as multipliers
        return np.array([self.ring_inv(a) if self.is_unit(a) else 0 for a in range(self.size)],
                        dtype=np.int64)

    @cached_property
    def unit_mask(self) -> np.ndarray:
        return np.array([self.is_unit(a) for a in range(self.size)])

    @cached_property
    def residue_table(self) -> np.ndarray:
        return np.array([self.residue(a) for a in range(self.size)], dtype=np.int64)


def count_cube_roots(Q: int, s: int) -> int:
    """#{a in R^x : a^3 = 1} for R = F_Q[t]/(t^s), by enumeration of units."""
    ring = LocalRing.truncated(Q, s)
    if ring.size > ENUM_CAP:
        raise ValueError(f"ring of size {ring.size} exceeds enumeration cap")
    return sum(1 for a in ring.units() if ring.ring_pow(a, 3) == 1)


def count_cube_roots_in(ring: LocalRing) -> int:
    if ring.size > ENUM_CAP:
        raise ValueError(f"ring of size {ring.size} exceeds enumeration cap")
    return sum(1 for a in ring.units() if ring.ring_pow(a, 3) == 1)


# -- group orders ------------------------------------------------------------

KINDS = ("GL3", "SL3", "PGL3", "PSL3")


def group_order(kind: str, Q: int, s: int) -> int:
    if prime_power(Q) is None:
        raise ValueError(f"Q={Q} is not a prime power")
    if s < 1:
        raise ValueError("s must be >= 1")
    sl = Q ** (8 * s - 5) * (Q ** 3 - 1) * (Q ** 2 - 1)
    if kind == "GL3":
        return Q ** (9 * s - 6) * (Q ** 3 - 1) * (Q ** 2 - 1) * (Q - 1)
    if kind in ("SL3", "PGL3"):
        return sl
    if kind == "PSL3":
        mu = count_cube_roots(Q, s)
        assert sl % mu == 0
        return sl // mu
    raise ValueError(f"unknown group kind {kind!r}")


def commuting_bound(Q: int, s: int) -> int:
    """3 Q^(2 ceil(log_Q s)) (Q^3 - 1)."""
    return 3 * Q ** (2 * ceil_log(Q, s)) * (Q ** 3 - 1)


# -- batched 3x3 matrices over a ring ---------------------------------------

class MatrixOps:
    """Vectorized 3x3 matrix arithmetic over a tabulated ring.

    Matrices are int arrays of shape (..., 3, 3) holding ring codes.
    """

    def __init__(self, ring: LocalRing):
        self.ring = ring
        self.add = ring.add_table
        self.mul = ring.mul_table
        self.neg = ring.neg_table
        self.inv = ring.inv_table
        self.unit = ring.unit_mask
        self.R = ring.size

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a, b = np.broadcast_arrays(a, b)
        out = np.empty(a.shape, dtype=np.int64)
        for i in range(3):
            for j in range(3):
                acc = self.mul[a[..., i, 0], b[..., 0, j]]
                acc = self.add[acc, self.mul[a[..., i, 1], b[..., 1, j]]]
                out[..., i, j] = self.add[acc, self.mul[a[..., i, 2], b[..., 2, j]]]
        return out

    def det(self, a: np.ndarray) -> np.ndarray:
        m, ad, ng = self.mul, self.add, self.neg

        def minor(i1, i2, j1, j2):
            return ad[m[a[..., i1, j1], a[..., i2, j2]], ng[m[a[..., i1, j2], a[..., i2, j1]]]]

        t0 = m[a[..., 0, 0], minor(1, 2, 1, 2)]
        t1 = ng[m[a[..., 0, 1], minor(1, 2, 0, 2)]]
        t2 = m[a[..., 0, 2], minor(1, 2, 0, 1)]
        return ad[ad[t0, t1], t2]

    def scale(self, a: np.ndarray, c: np.ndarray) -> np.ndarray:
        return self.mul[a, np.asarray(c)[..., None, None]]

    def normalize(self, a: np.ndarray) -> np.ndarray:
        """Projective normal form: first unit entry (row-major) scaled to 1."""
        flat = a.reshape(a.shape[:-2] + (9,))
        first = np.argmax(self.unit[flat], axis=-1)
        lead = np.take_along_axis(flat, first[..., None], axis=-1)[..., 0]
        return self.scale(a, self.inv[lead])

    def keys(self, a: np.ndarray) -> np.ndarray:
        flat = a.reshape(a.shape[:-2] + (9,)).astype(np.int64)
        w = self.R ** np.arange(9, dtype=np.int64)
        return flat @ w

    def from_key(self, key: int) -> np.ndarray:
        out = np.empty(9, dtype=np.int64)
        for i in range(9):
            out[i] = key % self.R
            key //= self.R
        return out.reshape(3, 3)

    def identity(self) -> np.ndarray:
        return np.eye(3, dtype=np.int64)

    def power(self, a: np.ndarray, e: int) -> np.ndarray:
        out = np.broadcast_to(self.identity(), a.shape).copy()
        base = a
        while e:
            if e & 1:
                out = self.matmul(out, base)
            base = self.matmul(base, base)
            e >>= 1
        return out

    def all_matrices(self, chunk: int = 1 << 16):
        """Every 3x3 matrix over the ring, in chunks of shape (n, 3, 3)."""
        total = self.R ** 9
        digits = self.R ** np.arange(9, dtype=np.int64)
        for lo in range(0, total, chunk):
            codes = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
            yield ((codes[:, None] // digits) % self.R).reshape(-1, 3, 3)


def ring_for(Q: int, s: int) -> LocalRing:
    return LocalRing.truncated(Q, s)


@dataclass
class OrderCount:
    Q: int
    s: int
    gl3: int
    sl3: int
    gl3_formula: int
    sl3_formula: int
    reduction_images: int
    gl3_residue: int

    @property
    def ok(self) -> bool:
        return (self.gl3 == self.gl3_formula and self.sl3 == self.sl3_formula
                and self.reduction_images == self.gl3_residue)


def brute_force_orders(ring: LocalRing) -> OrderCount:
    """Count GL3 / SL3 by enumerating all size^9 matrices; also check that
    reduction mod the maximal ideal hits all of GL3 of the residue field."""
    if ring.size ** 9 > 1 << 22:
        raise ValueError("brute-force enumeration capped at 2^22 matrices")
    ops = MatrixOps(ring)
    res = ring.residue_table
    gl = sl = 0
    images = set()
    Qd = ring.Q
    w = Qd ** np.arange(9, dtype=np.int64)
    for chunk in ops.all_matrices():
        d = ops.det(chunk)
        inv = ring.unit_mask[d]
        gl += int(inv.sum())
        sl += int((d == 1).sum())
        red = res[chunk[inv]].reshape(-1, 9)
        images.update((red @ w).tolist())
    Q, s = ring.Q, ring.s
    return OrderCount(Q, s, gl, sl, group_order("GL3", Q, s), group_order("SL3", Q, s),
                      len(images), group_order("GL3", Q, 1))


def pgl3_elements(ring: LocalRing) -> np.ndarray:
    """Normalized representatives of PGL3(ring), shape (|PGL3|, 3, 3)."""
    ops = MatrixOps(ring)
    out = []
    for chunk in ops.all_matrices():
        d = ops.det(chunk)
        g = chunk[ring.unit_mask[d]]
        if len(g) == 0:
            continue
        normal = (ops.keys(ops.normalize(g)) == ops.keys(g))
        out.append(g[normal])
    return np.concatenate(out)


@dataclass
class FrobeniusReport:
    Q: int
    s: int
    exponent: int
    kernel_size: int
    counterexamples: int
    max_order: int

    @property
    def ok(self) -> bool:
        return self.counterexamples == 0


def reduction_kernel(ring: LocalRing) -> np.ndarray:
    """All matrices I + M with every entry of M in the maximal ideal."""
    ideal = np.array(ring.maximal_ideal(), dtype=np.int64)
    n = len(ideal)
    codes = np.arange(n ** 9, dtype=np.int64)
    digits = n ** np.arange(9, dtype=np.int64)
    M = ideal[(codes[:, None] // digits) % n].reshape(-1, 3, 3)
    eye = np.eye(3, dtype=np.int64)
    return ring.add_table[M, eye]


def frobenius_unipotent_order(Q: int, s: int) -> FrobeniusReport:
    """Exponent Q^ceil(log_Q s), verified on the whole reduction kernel in PGL3."""
    e = Q ** ceil_log(Q, s)
    ring = ring_for(Q, s)
    if ring.size > ENUM_CAP:
        raise ValueError("ring too large to enumerate")
    ops = MatrixOps(ring)
    K = reduction_kernel(ring)
    ident_key = int(ops.keys(ops.identity()))
    powered = ops.normalize(ops.power(K, e))
    bad = int((ops.keys(powered) != ident_key).sum())
    # actual exponent of the kernel image in PGL3
    order = np.zeros(len(K), dtype=np.int64)
    cur = K.copy()
    for k in range(1, e + 1):
        hit = (order == 0) & (ops.keys(ops.normalize(cur)) == ident_key)
        order[hit] = k
        cur = ops.matmul(cur, K)
    return FrobeniusReport(Q, s, e, len(K), bad, int(order.max()) if (order > 0).all() else -1)


# -- commuting pairs ---------------------------------------------------------

class ProjectiveGroup:
    """PGL3 over a tabulated ring with Python-level products for closures."""

    def __init__(self, ring: LocalRing):
        self.ring = ring
        self.ops = MatrixOps(ring)
        self.R = ring.size
        self._mul = ring.mul_table.tolist()
        self._add = ring.add_table.tolist()
        self._inv = ring.inv_table.tolist()
        self._unit = ring.unit_mask.tolist()

    def product(self, a: tuple, b: tuple) -> tuple:
        """Normalized product of two flat 9-tuples."""
        m, ad = self._mul, self._add
        out = []
        for i in (0, 3, 6):
            for j in range(3):
                out.append(ad[ad[m[a[i]][b[j]]][m[a[i + 1]][b[j + 3]]]][m[a[i + 2]][b[j + 6]]])
        for x in out:
            if self._unit[x]:
                c = self._inv[x]
                return tuple(m[y][c] for y in out)
        raise ValueError("singular product")

    def closure(self, gens: list[tuple]) -> set[tuple]:
        """Subgroup generated by ``gens``: breadth-first closure under right
        multiplication by the generators."""
        ident = (1, 0, 0, 0, 1, 0, 0, 0, 1)
        seen = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.product(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    def cyclic(self, g: tuple) -> frozenset:
        return frozenset(self.closure([g]))

    def is_abelian(self, elems) -> bool:
        elems = list(elems)
        return all(self.product(a, b) == self.product(b, a) for a in elems for b in elems)


@dataclass
class CommutingReport:
    Q: int
    s: int
    mode: str
    bound: int
    max_found: int
    pairs_tested: int
    subgroups_closed: int
    violations: int
    all_abelian: bool
    witness: tuple = field(default=(), repr=False)

    @property
    def ok(self) -> bool:
        return self.violations == 0 and self.all_abelian

    def row(self) -> str:
        return (f"{self.Q},{self.s},{self.bound},{self.max_found},{self.pairs_tested},{self.mode},"
                f"{'PASS' if self.ok else 'FAIL'}")


def projective_centralizer(ops: MatrixOps, elems: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Indices of x with g x = lambda x g for some unit lambda."""
    left = ops.keys(ops.normalize(ops.matmul(g[None], elems)))
    right = ops.keys(ops.normalize(ops.matmul(elems, g[None])))
    return np.nonzero(left == right)[0]


def commuting_pair_bound_check(Q: int, s: int, mode: str = "exhaustive", budget: int = 10 ** 5,
                               seed: int = 0, per_outer: int = 100) -> CommutingReport:
    """Largest <g, h> over projectively commuting pairs, against the bound.

    Exhaustive mode runs the commutation test over all ordered pairs of
    PGL3.  Sampled mode draws ``budget // per_outer`` uniform elements g and
    ``per_outer`` uniform partners from each projective centralizer.
    Closures are cached by the pair of cyclic subgroups, which determines
    the generated group.
    """
    ring = ring_for(Q, s)
    group = ProjectiveGroup(ring)
    ops = group.ops
    elems = pgl3_elements(ring)
    if len(elems) != group_order("PGL3", Q, s):
        raise AssertionError("PGL3 enumeration disagrees with the order formula")
    bound = commuting_bound(Q, s)
    tuples = [tuple(int(x) for x in m.reshape(9)) for m in elems]
    cyc_cache: dict[int, frozenset] = {}
    sub_cache: dict[frozenset, int] = {}
    stats = {"max": 0, "pairs": 0, "viol": 0, "abelian": True, "witness": ()}

    def cyc(i):
        if i not in cyc_cache:
            cyc_cache[i] = group.cyclic(tuples[i])
        return cyc_cache[i]

    def visit(i, j):
        stats["pairs"] += 1
        key = frozenset((cyc(i), cyc(j)))
        if key not in sub_cache:
            H = group.closure([tuples[i], tuples[j]])
            if not group.is_abelian([tuples[i], tuples[j]]):
                stats["abelian"] = False
            sub_cache[key] = len(H)
        order = sub_cache[key]
        if order > bound:
            stats["viol"] += 1
        if order > stats["max"]:
            stats["max"], stats["witness"] = order, (tuples[i], tuples[j])

    if mode == "exhaustive":
        if len(elems) > PGL_EXHAUSTIVE_CAP:
            raise ValueError(f"|PGL3| = {len(elems)} exceeds exhaustive cap {PGL_EXHAUSTIVE_CAP}")
        for i in range(len(elems)):
            for j in projective_centralizer(ops, elems, elems[i]):
                visit(i, int(j))
    elif mode == "sampled":
        outer = max(budget // per_outer, 1)
        rng = make_rng(seed, 0)
        for _ in range(outer):
            i = int(rng.integers(len(elems)))
            cent = projective_centralizer(ops, elems, elems[i])
            for j in rng.choice(cent, size=per_outer):
                visit(i, int(j))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return CommutingReport(Q, s, mode, bound, stats["max"], stats["pairs"], len(sub_cache),
                           stats["viol"], stats["abelian"], stats["witness"])


def residue_params(q: int, f) -> GfParams:
    """GF presentation of the residue field F_q[y]/(f) when q is prime."""
    pk = prime_power(q)
    if pk is None or pk[1] != 1:
        raise ValueError("residue presentation available only over prime fields")
    return GfParams(q, len(f) - 1, tuple(int(c) for c in f))
