"""
Chamber removal on A2 links: exact perforated spectral gaps, the k-removal
infimum, and Garland certificates for perforated 2-complexes.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np

from .density import make_rng
from .geometry import Complex2, Graph, IncidenceGraph, cone, pg_graph, remove_edges
from .gf import prime_power
from .spectral import (ZERO_THRESHOLD, DisconnectedGraphError, IsolatedVertexError,
                       jacobi_eigh, lambda0)

FORMULA_TOL = 1e-9
GARLAND_EPS = 1e-6
EXHAUSTIVE_CAP = 10 ** 6


def feit_higman(q: int) -> float:
    """lambda_0 of the complete PG(2,q) incidence graph."""
    return 1 - math.sqrt(q) / (q + 1)


def lambda0_one_missing_formula(q: int) -> float:
    """lambda_0 of the PG(2,q) incidence graph with one flag removed."""
    if q < 2:
        raise ValueError("q must be >= 2")
    return 1 - (math.sqrt(q + 0.25) + 0.5) / (q + 1)


def _require_prime_power(q: int) -> None:
    if prime_power(q) is None:
        raise ValueError(f"q={q} is not a prime power")


def normalized_biadjacency(graph: IncidenceGraph) -> np.ndarray:
    """D_points^{-1/2} A0 D_lines^{-1/2}, rows = points, columns = lines."""
    m = graph.n_points
    a0 = graph.adjacency()[:m, m:]
    dp, dl = a0.sum(axis=1), a0.sum(axis=0)
    if (dp == 0).any() or (dl == 0).any():
        raise IsolatedVertexError("graph has an isolated vertex")
    return a0 / np.sqrt(dp)[:, None] / np.sqrt(dl)[None, :]


def bipartite_lambda0(graph: IncidenceGraph, solver: str = "jacobi") -> float:
    """lambda_0 through the singular values of the normalized biadjacency.

    For a bipartite graph with equal sides the normalized Laplacian spectrum
    is {1 - s, 1 + s} over the singular values s, so only the
    (points x points) Gram matrix needs diagonalizing.
    """
    if graph.n_points != graph.n_lines:
        raise ValueError("reduction assumes equally many points and lines")
    if not graph.is_connected():
        raise DisconnectedGraphError("perforated link is disconnected")
    b = normalized_biadjacency(graph)
    gram = b.T @ b
    if solver == "jacobi":
        mu, _, _ = jacobi_eigh(gram)
    else:
        mu = np.linalg.eigvalsh(gram)
    lam = 1 - np.sqrt(np.clip(mu, 0.0, None))
    if (lam < ZERO_THRESHOLD).sum() != 1:
        raise DisconnectedGraphError("perforated link is disconnected")
    return float(np.sort(lam[lam > ZERO_THRESHOLD])[0])


@dataclass
class PerforationReport:
    q: int
    k: int
    removed: list[list[int]]
    lambda0_numeric: list[float]
    lambda0_formula: float | None
    max_error: float | None
    gap_above_half: bool
    spread: float

    @property
    def ok(self) -> bool:
        return (self.max_error is None or self.max_error <= FORMULA_TOL) and self.spread <= FORMULA_TOL

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    def csv_rows(self) -> list[str]:
        rows = []
        for ids, lam in zip(self.removed, self.lambda0_numeric):
            rows.append(f"{self.q},{self.k},{' '.join(map(str, ids))},{lam:.15g}")
        return rows


def verify_one_missing(q: int, solver: str = "jacobi") -> PerforationReport:
    """lambda_0 for every single-flag removal from PG(2,q), against the formula."""
    _require_prime_power(q)
    if q > 9:
        raise ValueError("numeric sweep limited to q <= 9")
    g = pg_graph(q)
    formula = lambda0_one_missing_formula(q)
    vals = [bipartite_lambda0(remove_edges(g, [i]), solver) for i in range(len(g.edges))]
    arr = np.array(vals)
    return PerforationReport(
        q=q, k=1, removed=[[i] for i in range(len(g.edges))], lambda0_numeric=vals,
        lambda0_formula=formula, max_error=float(np.abs(arr - formula).max()),
        gap_above_half=bool(arr.min() > 0.5), spread=float(arr.max() - arr.min()))


@dataclass
class CharpolyReport:
    q: int
    roots: list[float]
    matched: list[bool]
    distances: list[float]
    reduced_charpoly: list[float]
    stated_charpoly: list[float]
    remaining_equal_q: bool

    @property
    def ok(self) -> bool:
        return all(self.matched)


def reduced_matrix(q: int) -> np.ndarray:
    """3x3 matrix of (q+1)^2 A^t A on span(v1, v2, v3)."""
    g = math.sqrt(1 + 1 / q)
    return np.array([[q + 1, 0, g], [0, 2 * q + 1, q], [q * q * g, q * q, q * q + q]])


def verify_charpoly_roots(q: int, tol: float = 1e-7) -> CharpolyReport:
    """Check (q+1)^2 and (2q+1 +- sqrt(4q+1))/2 in the spectrum of (q+1)^2 A^t A."""
    _require_prime_power(q)
    if q > 9:
        raise ValueError("limited to q <= 9")
    g = remove_edges(pg_graph(q), [0])
    b = normalized_biadjacency(g)
    w, _, _ = jacobi_eigh((q + 1) ** 2 * (b.T @ b))
    r = math.sqrt(4 * q + 1)
    roots = [(q + 1) ** 2, (2 * q + 1 - r) / 2, (2 * q + 1 + r) / 2]
    dist = [float(np.abs(w - x).min()) for x in roots]
    # the remaining eigenvalues should all sit at q
    rest = w.copy()
    for x in roots:
        rest = np.delete(rest, int(np.abs(rest - x).argmin()))
    stated = [-1.0, q * q + 4 * q + 2, -(2 * q ** 3 + 6 * q * q + 4 * q + 1), q * q * (q + 1) ** 2]
    # numpy.poly is monic x^3 - ...; the stated polynomial has leading -1
    reduced = (-np.poly(reduced_matrix(q))).tolist()
    return CharpolyReport(q, roots, [d <= tol for d in dist], dist, reduced, stated,
                          bool(np.abs(rest - q).max() <= tol))


@dataclass
class KMinReport:
    q: int
    k: int
    mode: str
    value: float
    witness: list[int]
    evaluated: int
    disconnecting: int
    witnesses_at_min: int = 0


def lambda0_k_min(q: int, k: int, mode: str = "exhaustive", budget: int = 1000,
                  seed: int = 0, solver: str = "jacobi") -> KMinReport:
    """Minimum lambda_0 over k-flag removals that keep the link connected."""
    _require_prime_power(q)
    g = pg_graph(q)
    nflags = len(g.edges)
    if k == 0:
        return KMinReport(q, 0, mode, bipartite_lambda0(g, solver), [], 1, 0, 1)
    if not 0 < k <= nflags:
        raise ValueError(f"k must be in [0, {nflags}]")
    if mode == "exhaustive":
        if math.comb(nflags, k) > EXHAUSTIVE_CAP:
            raise ValueError(f"C({nflags},{k}) exceeds exhaustive budget {EXHAUSTIVE_CAP}")
        subsets = combinations(range(nflags), k)
    elif mode == "sampled":
        rng = make_rng(seed, 0)
        subsets = (sorted(rng.choice(nflags, size=k, replace=False).tolist()) for _ in range(budget))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    best, witness, evaluated, disc, ties = math.inf, [], 0, 0, 0
    for sub in subsets:
        h = remove_edges(g, sub)
        evaluated += 1
        if not h.is_connected():
            disc += 1
            continue
        val = bipartite_lambda0(h, solver)
        if val < best - FORMULA_TOL:
            best, witness, ties = val, list(sub), 1
        elif abs(val - best) <= FORMULA_TOL:
            ties += 1
    return KMinReport(q, k, mode, best, witness, evaluated, disc, ties)


@dataclass
class GarlandCertificate:
    complex_id: str
    lambda0: dict[int, float]
    min_lambda0: float | None
    certified: bool
    inconclusive_vertices: list[int] = field(default_factory=list)
    disconnected_vertices: list[int] = field(default_factory=list)

    def to_json(self) -> str:
        d = asdict(self)
        d["lambda0"] = {str(k): v for k, v in self.lambda0.items()}
        return json.dumps(d)


def garland_certificate(complex_: Complex2, removed=(), eps: float = GARLAND_EPS,
                        solver: str = "jacobi") -> GarlandCertificate:
    """Certify lambda_0 > 1/2 at every vertex link of the perforated complex."""
    removed = set(removed)
    for f in removed:
        if not 0 <= f < complex_.n_faces:
            raise ValueError(f"unknown face {f}")
    lams: dict[int, float] = {}
    disconnected, inconclusive = [], []
    for v in range(complex_.n_vertices):
        lk = complex_.link(v, removed)
        if lk.n == 0 or not lk.is_connected():
            disconnected.append(v)
            continue
        lam = lambda0(lk, solver)
        lams[v] = lam
        if abs(lam - 0.5) <= eps:
            inconclusive.append(v)
    low = min(lams.values()) if lams else None
    certified = (not disconnected and not inconclusive and low is not None and low > 0.5)
    return GarlandCertificate(complex_.name, lams, low, certified, inconclusive, disconnected)


def link_certificate(graph: Graph, eps: float = GARLAND_EPS) -> GarlandCertificate:
    """Certificate for a single link graph (the complex is the cone over it)."""
    return garland_certificate(cone(graph, "cone"), (), eps)
