"""Group orders, cube-root counts and commuting-pair maxima over F_Q[t]/(t^s)."""

import argparse

from randbuild.local_rings import (KINDS, commuting_pair_bound_check, count_cube_roots,
                                   group_order)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", nargs="+", default=["2,1", "3,1", "4,1", "2,2", "3,2", "2,3"])
    ap.add_argument("--commuting", action="store_true", help="also run the commuting sweep")
    ap.add_argument("--budget", type=int, default=10 ** 4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print("Q,s," + ",".join(KINDS) + ",mu")
    for spec in args.pairs:
        Q, s = (int(x) for x in spec.split(","))
        orders = [str(group_order(k, Q, s)) for k in KINDS]
        print(f"{Q},{s}," + ",".join(orders) + f",{count_cube_roots(Q, s)}")
    if args.commuting:
        print("Q,s,bound,max_found,pairs_tested,mode,status")
        for Q, s, mode in ((2, 1, "exhaustive"), (3, 1, "exhaustive"), (2, 2, "sampled")):
            rep = commuting_pair_bound_check(Q, s, mode, args.budget, args.seed)
            print(rep.row())


if __name__ == "__main__":
    main()
