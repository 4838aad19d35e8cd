"""Finite-size estimates for the separation and occupancy events on tori.

With m = ceil(N^delta) draws among N = 2 n^2 faces, each face has 12
vertex-sharing neighbours, so

    P(2-separated)      ~ exp(-C(m,2) * 12 / N)
    P(no ball >= 3)     ~ exp(-N * C(13,3) * (m/N)^3)

The script prints both estimates next to Monte Carlo values and the torus
side at which the first estimate would reach a target probability.
"""

import argparse
import math

from randbuild.density import DensityConfig, run_event, sample_size
from randbuild.geometry import build_torus


def sep_estimate(N, delta):
    m = sample_size(N, delta)
    return math.exp(-math.comb(m, 2) * 12 / N)


def occ_estimate(N, delta):
    m = sample_size(N, delta)
    return math.exp(-N * math.comb(13, 3) * (m / N) ** 3)


def side_needed(estimate, delta, target):
    n = 3
    while estimate(2 * n * n, delta) < target:
        n = math.ceil(n * 1.1)
    return n


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sides", type=int, nargs="+", default=[8, 12, 16])
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--target", type=float, default=0.9)
    args = ap.parse_args()

    print("n,N,event,delta,m,estimate,p_hat")
    for n in args.sides:
        t = build_torus(n)
        N = t.n_faces
        for event, delta, est, extra in (("r-separated", 0.35, sep_estimate, dict(r=2)),
                                         ("ball-occupancy", 0.55, occ_estimate, dict(r=1, k=2))):
            st = run_event(t, DensityConfig(delta, args.trials, args.seed, **extra), event, n=n)
            print(f"{n},{N},{event},{delta},{st.m},{est(N, delta):.4f},{st.p_hat:.4f}")
    n_sep = side_needed(sep_estimate, 0.35, args.target)
    print(f"# 2-separated at delta=0.35 reaches {args.target} near n = {n_sep} "
          f"(N = {2 * n_sep * n_sep})")
    # occupancy: solve 286 * N^(1 - 3(1 - delta)) = -log(target) in N
    expo = 3 * (1 - 0.55) - 1
    N_occ = (286 / -math.log(args.target)) ** (1 / expo)
    print(f"# occupancy at delta=0.55 reaches {args.target} near N = {N_occ:.2e} faces")


if __name__ == "__main__":
    main()
