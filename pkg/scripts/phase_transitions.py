"""Monte Carlo sweep of the density-model events over delta and torus size.

Prints one CSV row per (n, delta, event) with the density module's schema.
"""

import argparse
import sys

import numpy as np

from randbuild.density import DensityConfig, run_event, stats_to_csv
from randbuild.geometry import build_torus, thick_torus

# event -> (complex family, DensityConfig extras)
EVENTS = {
    "r-separated": (build_torus, dict(r=2)),
    "adjacent-pairs": (build_torus, dict(r=3)),
    "ball-occupancy": (build_torus, dict(r=1, k=2)),
    "no-free-edges": (lambda n: thick_torus(n, 1), dict(r=2)),
    "free-edges": (lambda n: thick_torus(n, 1), dict(r=2, ell=3)),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sides", type=int, nargs="+", default=[8, 12, 16])
    ap.add_argument("--deltas", type=float, nargs="+",
                    default=np.round(np.arange(0.2, 0.951, 0.05), 2).tolist())
    ap.add_argument("--events", nargs="+", choices=list(EVENTS), default=list(EVENTS))
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, required=True)
    args = ap.parse_args()

    stats = []
    for event in args.events:
        family, extra = EVENTS[event]
        for n in args.sides:
            c = family(n)
            for delta in args.deltas:
                cfg = DensityConfig(delta, args.trials, args.seed, **extra)
                stats.append(run_event(c, cfg, event, n=n))
    sys.stdout.write(stats_to_csv(stats))


if __name__ == "__main__":
    main()
