"""
Monte Carlo engine for the density model.

A trial draws m = ceil(N^delta) faces i.i.d. uniformly (with replacement)
from the N faces of a complex; geometric events are evaluated on the
deduplicated set A of drawn faces.

Reproducibility: trial t of a run with seed s uses the generator
``PCG64(splitmix64(splitmix64(s) ^ t))``, so a trial's outcome depends only
on (s, t) and not on the order trials are executed in.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable

import numpy as np

from .geometry import Complex2

MASK64 = (1 << 64) - 1
CSV_FIELDS = ["n", "N_faces", "delta", "m", "event", "trials", "successes", "p_hat", "stderr", "seed"]
SURVIVAL_GUARD = 0.79


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def make_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(splitmix64(splitmix64(seed & MASK64) ^ trial)))


def sample_size(n_faces: int, delta: float) -> int:
    """ceil(N^delta), snapping values within 1e-9 of an integer."""
    x = float(n_faces) ** float(delta)
    r = round(x)
    if abs(x - r) < 1e-9:
        return max(int(r), 1)
    return math.ceil(x)


@dataclass(frozen=True)
class DensityConfig:
    delta: float
    trials: int = 500
    seed: int = 0
    r: int = 2
    k: int = 2
    ell: int = 3

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass
class ChamberSample:
    draws: np.ndarray
    A: np.ndarray
    m: int


def sample_chambers(complex_: Complex2, config: DensityConfig,
                    rng: np.random.Generator) -> ChamberSample:
    N = complex_.n_faces
    if N < 2:
        raise ValueError("complex needs at least two faces")
    m = sample_size(N, config.delta)
    draws = rng.integers(0, N, size=m)
    return ChamberSample(draws, np.unique(draws), m)


def event_r_separated(sample: ChamberSample, complex_: Complex2, r: int) -> bool:
    """Every two distinct members of A are at face distance >= r."""
    A = sample.A
    if len(A) < 2:
        return True
    d = complex_.face_distances[np.ix_(A, A)]
    iu = np.triu_indices(len(A), 1)
    return bool((d[iu] >= r).all())


def adjacent_pairs(sample: ChamberSample, complex_: Complex2) -> int:
    A = sample.A
    if len(A) < 2:
        return 0
    d = complex_.face_distances[np.ix_(A, A)]
    iu = np.triu_indices(len(A), 1)
    return int((d[iu] == 1).sum())


def event_adjacent_pairs(sample: ChamberSample, complex_: Complex2, r_count: int) -> bool:
    """At least r_count unordered pairs of A at face distance 1."""
    return adjacent_pairs(sample, complex_) >= r_count


def max_ball_occupancy(sample: ChamberSample, complex_: Complex2, r: int) -> int:
    if len(sample.A) == 0:
        return 0
    return int((complex_.face_distances[:, sample.A] <= r).sum(axis=1).max())


def event_ball_occupancy(sample: ChamberSample, complex_: Complex2, r: int, k: int) -> bool:
    """No face-centred ball of radius r holds more than k members of A."""
    return max_ball_occupancy(sample, complex_, r) <= k


def free_edges(sample: ChamberSample, complex_: Complex2) -> list[int]:
    """Edges all of whose q_e + 1 incident faces were drawn."""
    inA = np.zeros(complex_.n_faces, dtype=bool)
    inA[sample.A] = True
    return [e for e, fs in enumerate(complex_.edge_faces) if fs and inA[list(fs)].all()]


def count_free_edges(sample: ChamberSample, complex_: Complex2, r: int = 2) -> tuple[int, int]:
    """(number of free edges, size of a greedy r-separated subset of them)."""
    free = free_edges(sample, complex_)
    kept: list[int] = []
    for e in free:
        if all(complex_.edge_distance(e, f) >= r for f in kept):
            kept.append(e)
    return len(free), len(kept)


EVENTS = ("r-separated", "adjacent-pairs", "ball-occupancy", "free-edges", "no-free-edges")


def evaluate_event(event: str, sample: ChamberSample, complex_: Complex2,
                   config: DensityConfig) -> bool:
    if event == "r-separated":
        return event_r_separated(sample, complex_, config.r)
    if event == "adjacent-pairs":
        return event_adjacent_pairs(sample, complex_, config.r)
    if event == "ball-occupancy":
        return event_ball_occupancy(sample, complex_, config.r, config.k)
    if event == "free-edges":
        return count_free_edges(sample, complex_, config.r)[1] >= config.ell
    if event == "no-free-edges":
        return count_free_edges(sample, complex_, config.r)[0] == 0
    raise ValueError(f"unknown event {event!r}; expected one of {EVENTS}")


@dataclass
class EventStats:
    event: str
    trials: int
    successes: int
    p_hat: float
    stderr: float
    seed: int
    n: int | str = ""
    N_faces: int = 0
    delta: float = 0.0
    m: int = 0

    def __post_init__(self):
        if not 0 <= self.successes <= self.trials:
            raise ValueError("successes out of range")

    @classmethod
    def from_counts(cls, event: str, trials: int, successes: int, seed: int, **kw) -> "EventStats":
        p = successes / trials
        return cls(event, trials, successes, p, math.sqrt(p * (1 - p) / trials), seed, **kw)

    def row(self) -> dict:
        d = asdict(self)
        return {k: d[k] for k in CSV_FIELDS}


def trial_outcome(complex_: Complex2, config: DensityConfig, event: str, trial: int) -> bool:
    sample = sample_chambers(complex_, config, make_rng(config.seed, trial))
    return evaluate_event(event, sample, complex_, config)


def run_event(complex_: Complex2, config: DensityConfig, event: str,
              trial_order: Iterable[int] | None = None, n: int | str = "") -> EventStats:
    """Monte Carlo estimate of P(event); success counts are order independent."""
    order = range(config.trials) if trial_order is None else trial_order
    hits = sum(trial_outcome(complex_, config, event, t) for t in order)
    return EventStats.from_counts(
        event, config.trials, int(hits), config.seed, n=n, N_faces=complex_.n_faces,
        delta=config.delta, m=sample_size(complex_.n_faces, config.delta))


def stats_to_csv(stats: list[EventStats]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for s in stats:
        w.writerow(s.row())
    return buf.getvalue()


def stats_to_json(stats: list[EventStats]) -> str:
    return json.dumps([s.row() for s in stats])


# -- flats -----------------------------------------------------------------

def ceil_log(Q: int, s: int) -> int:
    """Smallest e >= 0 with Q**e >= s (exact integer arithmetic)."""
    if Q < 2 or s < 1:
        raise ValueError("need Q >= 2 and s >= 1")
    e, x = 0, 1
    while x < s:
        x *= Q
        e += 1
    return e


@dataclass(frozen=True)
class FlatTrace:
    """Designated face subset F' that the draws must avoid."""

    faces: frozenset
    n_faces: int

    def __post_init__(self):
        if not self.faces:
            raise ValueError("flat trace must be nonempty")
        if any(not 0 <= f < self.n_faces for f in self.faces):
            raise ValueError("flat trace outside the face set")

    @property
    def size(self) -> int:
        return len(self.faces)

    @classmethod
    def first(cls, n_faces: int, size: int) -> "FlatTrace":
        return cls(frozenset(range(size)), n_faces)

    @classmethod
    def sized(cls, n_faces: int, C: int, Q: int, s: int) -> "FlatTrace":
        """|F'| = min(N, C * Q^(2 ceil(log_Q s) + 3))."""
        size = min(n_faces, C * Q ** (2 * ceil_log(Q, s) + 3))
        return cls.first(n_faces, size)


@dataclass
class SurvivalReport:
    stats: EventStats
    exact: float
    bound: float | None
    guard_ok: bool
    bound_ok: bool
    exact_ok: bool


def flat_survival(N: int, trace: FlatTrace, delta: float, trials: int, seed: int) -> SurvivalReport:
    """P(all m = ceil(N^delta) draws avoid F') by simulation, exactly, and bounded."""
    if trace.n_faces != N:
        raise ValueError("trace built for a different N")
    m = sample_size(N, delta)
    bad = np.zeros(N, dtype=bool)
    bad[list(trace.faces)] = True
    hits = 0
    for t in range(trials):
        draws = make_rng(seed, t).integers(0, N, size=m)
        hits += not bad[draws].any()
    stats = EventStats.from_counts("flat-survival", trials, hits, seed, N_faces=N, delta=delta, m=m)
    x = trace.size / N
    exact = (1 - x) ** m
    guard = x < SURVIVAL_GUARD
    bound = math.exp(-2 * m * x) if guard else None
    slack = 3 * stats.stderr
    return SurvivalReport(
        stats, exact, bound, guard,
        bound_ok=(bound is None) or stats.p_hat >= bound - slack,
        exact_ok=abs(stats.p_hat - exact) <= slack)


# -- threshold calculus ----------------------------------------------------

@dataclass
class ThresholdReport:
    Q: int
    s: int
    delta: Fraction | float
    exponent: Fraction | float
    critical_delta: Fraction
    generic_exponent: Fraction | float
    theorem_delta: Fraction | None
    discrepancy: bool
    note: str = ""

    def as_dict(self) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, Fraction):
                d[k] = str(v)
        return d


def threshold_exponent(Q: int, s: int, delta) -> ThresholdReport:
    """Exponent of Q in |C|^(delta-1)|F'| and the resulting critical density.

    Pass ``delta`` as a Fraction for exact arithmetic.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    generic = 2 * ceil_log(Q, s) + 8 * s * (delta - 1) + 3
    if s == 1:
        return ThresholdReport(Q, s, delta, 8 * (delta - 1) + 3, Fraction(5, 8), generic,
                               None, False)
    exponent = (1 - delta) * (s - 1) + 8 * s * (delta - 1) + 3
    crit = Fraction(7 * s - 2, 7 * s + 1)
    stated = Fraction(7 * s - 3, 7 * s + 1)
    note = f"proof gives delta* = {crit}; main theorem states {stated}"
    return ThresholdReport(Q, s, delta, exponent, crit, generic, stated, crit != stated, note)


def fa_threshold(q_star: int) -> tuple[Fraction, Fraction, bool]:
    """(q*/(q*+1), the theorem's q/(q-1), flag that the latter exceeds 1)."""
    implemented = Fraction(q_star, q_star + 1)
    stated = Fraction(q_star, q_star - 1) if q_star > 1 else Fraction(10 ** 9)
    return implemented, stated, stated >= 1


# -- exact domination --------------------------------------------------------

Property = Callable[[frozenset], bool]


def _as_predicate(prop) -> Property:
    if callable(prop):
        return prop
    family = {frozenset(s) for s in prop}
    return lambda S: frozenset(S) in family


def is_monotone(N: int, prop) -> bool:
    """Upward closed over the subset lattice of range(N) (exhaustive)."""
    pred = _as_predicate(prop)
    for mask in range(1 << N):
        S = frozenset(i for i in range(N) if mask >> i & 1)
        if pred(S):
            for x in range(N):
                if x not in S and not pred(S | {x}):
                    return False
    return True


def exact_probability(N: int, m: int, prop) -> Fraction:
    """P(prop holds of the set of m i.i.d. uniform draws), by enumerating N^m sequences."""
    pred = _as_predicate(prop)
    cache: dict[frozenset, bool] = {}
    hits = 0
    for seq in product(range(N), repeat=m):
        S = frozenset(seq)
        if S not in cache:
            cache[S] = bool(pred(S))
        hits += cache[S]
    return Fraction(hits, N ** m)


@dataclass
class DominationReport:
    N: int
    m1: int
    m2: int
    p1: Fraction
    p2: Fraction
    monotone: bool

    @property
    def holds(self) -> bool:
        return self.p1 <= self.p2


def domination_exact(N: int, m1: int, m2: int, prop) -> DominationReport:
    if N > 8 or m2 > 5:
        raise ValueError("exact enumeration limited to N <= 8, m <= 5")
    if not 0 <= m1 <= m2:
        raise ValueError("need 0 <= m1 <= m2")
    if not is_monotone(N, prop):
        raise ValueError("property is not monotone under inclusion")
    return DominationReport(N, m1, m2, exact_probability(N, m1, prop),
                            exact_probability(N, m2, prop), True)


def random_monotone_property(N: int, rng: np.random.Generator,
                             n_generators: int | None = None) -> frozenset:
    """Upward closure of a few random generating sets, as a family of frozensets."""
    if n_generators is None:
        n_generators = int(rng.integers(1, 4))
    gens = []
    for _ in range(n_generators):
        size = int(rng.integers(1, N + 1))
        gens.append(frozenset(rng.choice(N, size=size, replace=False).tolist()))
    family = set()
    for mask in range(1 << N):
        S = frozenset(i for i in range(N) if mask >> i & 1)
        if any(g <= S for g in gens):
            family.add(S)
    return frozenset(family)
