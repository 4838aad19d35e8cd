"""
Acceptance suite: fourteen end-to-end criteria at their stated tolerances.

Each criterion is a function returning (passed, detail).  Under pytest,
every test prints one ``criterion NN: PASS|FAIL  detail`` line (also when
output capture is on) and then asserts.  Run this file directly to get the
fourteen lines without pytest.
"""

import math
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from randbuild.density import (DensityConfig, FlatTrace, domination_exact, flat_survival,
                               make_rng, random_monotone_property, run_event, threshold_exponent)
from randbuild.geometry import build_torus, pg_graph, remove_edges, thick_torus
from randbuild.local_rings import (brute_force_orders, commuting_pair_bound_check,
                                   frobenius_unipotent_order, ring_for)
from randbuild.perforation import (bipartite_lambda0, feit_higman, link_certificate,
                                   verify_charpoly_roots, verify_one_missing)
from randbuild.spectral import cheeger_chain_check, cheeger_exact, lambda0

TORUS_SIDES = (8, 12, 16)
TRIALS = 500
SEED = 7


def c01_feit_higman():
    parts = []
    ok = True
    for q in (2, 3, 4, 5, 7, 8, 9):
        t = time.perf_counter()
        lam = lambda0(pg_graph(q))
        dt = time.perf_counter() - t
        err = abs(lam - feit_higman(q))
        ok &= err <= 1e-9 and dt < 10
        parts.append(f"q={q} err={err:.1e} {dt:.1f}s")
    return ok, "; ".join(parts)


def c02_one_chamber():
    parts = []
    ok = True
    for q in (2, 3, 4, 5, 7):
        rep = verify_one_missing(q)
        ok &= rep.max_error <= 1e-9 and rep.spread <= 1e-9
        parts.append(f"q={q} n={len(rep.removed)} err={rep.max_error:.1e} spread={rep.spread:.1e}")
    return ok, "; ".join(parts)


def c03_property_t_boundary():
    vals, certs = {}, {}
    for q in (4, 5):
        g = remove_edges(pg_graph(q), [0])
        vals[q] = bipartite_lambda0(g)
        certs[q] = link_certificate(g).certified
    ok = vals[5] > 0.5 and vals[4] < 0.5 and certs[5] and not certs[4]
    return ok, (f"q=5 lambda0={vals[5]:.7f} certified={certs[5]}; "
                f"q=4 lambda0={vals[4]:.7f} certified={certs[4]}")


def c04_charpoly_roots():
    worst = 0.0
    ok = True
    for q in (2, 3, 4, 5):
        rep = verify_charpoly_roots(q, tol=1e-7)
        ok &= rep.ok
        worst = max(worst, max(rep.distances))
    return ok, f"max root distance {worst:.1e} over q=2..5"


def c05_group_orders():
    t = time.perf_counter()
    parts = []
    ok = True
    for Q, s in ((2, 1), (3, 1), (4, 1), (2, 2)):
        rep = brute_force_orders(ring_for(Q, s))
        ok &= rep.gl3 == rep.gl3_formula and rep.sl3 == rep.sl3_formula
        parts.append(f"({Q},{s}) GL3={rep.gl3} SL3={rep.sl3}")
        if (Q, s) == (2, 2):
            ok &= rep.gl3 == 86016
    dt = time.perf_counter() - t
    ok &= dt < 60
    return ok, "; ".join(parts) + f"; {dt:.1f}s"


def c06_commuting_bound():
    t = time.perf_counter()
    reps = [commuting_pair_bound_check(2, 1, "exhaustive"),
            commuting_pair_bound_check(3, 1, "exhaustive"),
            commuting_pair_bound_check(2, 2, "sampled", budget=10 ** 5, seed=SEED)]
    dt = time.perf_counter() - t
    ok = all(r.ok for r in reps) and reps[2].pairs_tested == 10 ** 5 and reps[2].bound == 84
    ok &= reps[0].bound == 21 and reps[1].bound == 78 and dt < 300
    detail = "; ".join(f"({r.Q},{r.s}) {r.mode} max={r.max_found}/{r.bound} pairs={r.pairs_tested}"
                       for r in reps)
    return ok, detail + f"; {dt:.0f}s"


def c07_frobenius():
    reps = [frobenius_unipotent_order(2, 2), frobenius_unipotent_order(3, 2)]
    ok = all(r.counterexamples == 0 for r in reps)
    return ok, "; ".join(f"({r.Q},{r.s}) exp={r.exponent} kernel={r.kernel_size} "
                         f"bad={r.counterexamples}" for r in reps)


def _torus_probs(event, delta, complex_fn=build_torus, **kw):
    out = []
    for n in TORUS_SIDES:
        cfg = DensityConfig(delta, TRIALS, SEED, **kw)
        out.append(run_event(complex_fn(n), cfg, event, n=n))
    return out


def _increasing(stats):
    p = [s.p_hat for s in stats]
    return all(a < b for a, b in zip(p, p[1:]))


def c08_half_transition():
    sep = _torus_probs("r-separated", 0.35, r=2)
    adj = _torus_probs("adjacent-pairs", 0.65, r=3)
    ok_sep = sep[-1].p_hat >= 0.9 and _increasing(sep)
    ok_adj = adj[-1].p_hat >= 0.9 and (_increasing(adj) or all(s.p_hat == 1 for s in adj))
    fmt = lambda st: "/".join(f"{s.p_hat:.3f}" for s in st)
    return ok_sep and ok_adj, (f"2-separated@0.35 n=8/12/16: {fmt(sep)} "
                               f"[{'ok' if ok_sep else 'FAIL'}]; "
                               f">=3 adjacent@0.65: {fmt(adj)} [{'ok' if ok_adj else 'FAIL'}]")


def c09_occupancy():
    t = build_torus(16)
    lo = run_event(t, DensityConfig(0.55, TRIALS, SEED, r=1, k=2), "ball-occupancy", n=16)
    hi = run_event(t, DensityConfig(0.75, TRIALS, SEED, r=1, k=2), "ball-occupancy", n=16)
    ok_lo = lo.p_hat >= 0.9 - 3 * lo.stderr
    ok_hi = hi.p_hat <= 0.1 + 3 * hi.stderr
    return ok_lo and ok_hi, (f"delta=0.55 p={lo.p_hat:.3f}+-{lo.stderr:.3f} "
                             f"[{'ok' if ok_lo else 'FAIL'}]; "
                             f"delta=0.75 p={hi.p_hat:.3f}+-{hi.stderr:.3f} "
                             f"[{'ok' if ok_hi else 'FAIL'}]")


def c10_free_edges():
    thick = lambda n: thick_torus(n, 1)
    assert thick(3).q_min == 3
    none = _torus_probs("no-free-edges", 0.6, thick, r=2)
    many = run_event(thick(16), DensityConfig(0.85, TRIALS, SEED, r=2, ell=3), "free-edges", n=16)
    ok = all(s.p_hat >= 0.9 for s in none) and many.p_hat >= 0.9
    return ok, ("no free edge@0.6 n=8/12/16: " + "/".join(f"{s.p_hat:.3f}" for s in none)
                + f"; >=3 separated free edges@0.85 n=16: {many.p_hat:.3f}")


def c11_survival():
    ok = True
    cells = 0
    worst = math.inf
    for N in (1000, 10 ** 4):
        for C, Q, s in ((1, 2, 1), (1, 2, 2), (2, 2, 2)):
            trace = FlatTrace.sized(N, C, Q, s)
            for delta in (0.3, 0.5, 0.6):
                rep = flat_survival(N, trace, delta, 2000, SEED + cells)
                assert rep.guard_ok
                ok &= rep.bound_ok and rep.exact_ok
                se = max(rep.stats.stderr, 1e-12)
                worst = min(worst, 3 - abs(rep.stats.p_hat - rep.exact) / se)
                cells += 1
    return ok, f"{cells} cells, |F'| in {{8,32,64}}, min 3-sigma headroom {worst:.2f} sigma"


def c12_thresholds():
    ok = threshold_exponent(2, 1, Fraction(5, 8)).critical_delta == Fraction(5, 8)
    ok &= threshold_exponent(2, 1, Fraction(5, 8)).exponent == 0
    parts = ["s=1 5/8"]
    for s in (2, 3, 5):
        rep = threshold_exponent(2, s, Fraction(1, 2))
        crit = Fraction(7 * s - 2, 7 * s + 1)
        ok &= rep.critical_delta == crit and rep.discrepancy
        ok &= threshold_exponent(2, s, crit).exponent == 0
        parts.append(f"s={s} {rep.critical_delta} (flag vs {rep.theorem_delta})")
    return ok, "; ".join(parts)


def c13_domination():
    rng = make_rng(SEED, 13)
    worst = None
    for _ in range(20):
        N = int(rng.integers(2, 7))
        m1 = int(rng.integers(1, 4))
        m2 = int(rng.integers(m1 + 1, 5))
        prop = random_monotone_property(N, rng)
        rep = domination_exact(N, m1, m2, prop)
        if not rep.holds:
            return False, f"violated at N={N} m1={m1} m2={m2}: {rep.p1} > {rep.p2}"
        gap = rep.p2 - rep.p1
        worst = gap if worst is None else min(worst, gap)
    return True, f"20 properties, min P(m2)-P(m1) = {worst}"


def c14_cheeger():
    g = pg_graph(2)
    h, _ = cheeger_exact(g)
    lam = lambda0(g)
    ok1 = lam <= 2 * h
    G = pg_graph(9)
    rep = cheeger_chain_check(G, remove_edges(G, [0]), 1, 0.5)
    ok2 = rep.applicable and bool(rep.holds)
    return ok1 and ok2, (f"Heawood lambda0={lam:.4f} <= 2h={2 * h:.4f}; PG(2,9)-e: "
                         f"lambda0(G)={rep.lambda0_G:.4f} <= {rep.rhs_cheeger:.4f} and "
                         f"<= {rep.rhs_sqrt:.4f}")


CRITERIA = [c01_feit_higman, c02_one_chamber, c03_property_t_boundary, c04_charpoly_roots,
            c05_group_orders, c06_commuting_bound, c07_frobenius, c08_half_transition,
            c09_occupancy, c10_free_edges, c11_survival, c12_thresholds, c13_domination,
            c14_cheeger]


def _line(i, ok, detail):
    return f"criterion {i:02d}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.mark.parametrize("idx", range(1, len(CRITERIA) + 1),
                         ids=[f.__name__ for f in CRITERIA])
def test_criterion(idx, capsys):
    ok, detail = CRITERIA[idx - 1]()
    with capsys.disabled():
        print("\n" + _line(idx, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for i, fn in enumerate(CRITERIA, 1):
        ok, detail = fn()
        failures += not ok
        print(_line(i, ok, detail), flush=True)
    sys.exit(1 if failures else 0)
