"""
Command-line front end.

    randbuild spectral --q 3 --remove 1
    randbuild rings --q 2 --s 2 --check orders
    randbuild density --complex torus:12 --delta 0.4 --event r-separated --seed 7
    randbuild thresholds --s 3

Output goes to stdout (or ``--out``); a JSON run manifest goes to stderr,
or to ``--manifest``.  Exit codes: 0 pass, 1 invariant failure, 2 usage.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction

from . import __version__
from .density import (EVENTS, DensityConfig, fa_threshold, run_event, stats_to_json,
                      threshold_exponent)
from .geometry import Complex2, build_torus, pg_graph, remove_edges, thick_torus
from .gf import GF, prime_power
from .local_rings import (KINDS, LocalRing, brute_force_orders, commuting_pair_bound_check,
                          count_cube_roots, count_cube_roots_in, frobenius_unipotent_order,
                          group_order, parse_poly, ring_for)
from .perforation import (FORMULA_TOL, bipartite_lambda0, feit_higman, lambda0_k_min,
                          lambda0_one_missing_formula, verify_one_missing)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class RunManifest:
    subcommand: str
    params: dict
    seed: int | None
    version: str = __version__
    schema: int = SCHEMA_VERSION
    format: str = "csv"
    started: str = ""
    finished: str = ""
    sha256: str = ""
    passed: bool | None = None
    argv: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


@dataclass
class Result:
    rows: list[dict]
    passed: bool
    payload: str | None = None  # preformatted JSON, when rows are not flat


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _prime_power_arg(text: str) -> int:
    try:
        q = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text}")
    if q < 2 or prime_power(q) is None:
        raise argparse.ArgumentTypeError(f"{q} is not a prime power >= 2")
    return q


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _open_delta(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("delta must lie in (0, 1)")
    return v


def parse_complex(spec: str) -> tuple[Complex2, int]:
    kind, _, rest = spec.partition(":")
    try:
        if kind == "torus":
            n = int(rest)
            return build_torus(n), n
        if kind == "thick":
            n, t = (int(x) for x in rest.split(","))
            return thick_torus(n, t), n
    except ValueError as e:
        raise UsageError(f"bad complex {spec!r}: {e}")
    raise UsageError(f"unknown complex {spec!r}; use torus:n or thick:n,t")


# -- subcommands -------------------------------------------------------------

def cmd_spectral(args) -> Result:
    q = args.q
    g = pg_graph(q)
    if args.sweep:
        rep = verify_one_missing(q, args.solver)
        rows = [{"q": q, "k": 1, "removal_ids": ids[0], "lambda0": f"{lam:.15g}"}
                for ids, lam in zip(rep.removed, rep.lambda0_numeric)]
        return Result(rows, rep.ok)
    if args.kmin is not None:
        rep = lambda0_k_min(q, args.kmin, args.mode, args.budget, args.seed, args.solver)
        rows = [{"q": q, "k": rep.k, "removal_ids": " ".join(map(str, rep.witness)),
                 "lambda0": f"{rep.value:.15g}"}]
        return Result(rows, rep.evaluated > rep.disconnecting)
    ids = _removal_ids(args.remove, len(g.edges))
    h = remove_edges(g, ids)
    lam = bipartite_lambda0(h, args.solver)
    if not ids:
        expected = feit_higman(q)
    elif len(ids) == 1:
        expected = lambda0_one_missing_formula(q)
    else:
        expected = None
    ok = expected is None or abs(lam - expected) <= FORMULA_TOL
    rows = [{"q": q, "k": len(ids), "removal_ids": " ".join(map(str, ids)),
             "lambda0": f"{lam:.15g}"}]
    return Result(rows, ok)


def _removal_ids(text: str | None, n_flags: int) -> list[int]:
    if not text:
        return []
    if "," in text or text.startswith("="):
        ids = [int(x) for x in text.lstrip("=").split(",") if x]
    else:
        k = int(text)
        if not 0 <= k <= n_flags:
            raise UsageError(f"--remove {k} outside [0, {n_flags}]")
        ids = list(range(k))
    for i in ids:
        if not 0 <= i < n_flags:
            raise UsageError(f"flag id {i} outside [0, {n_flags})")
    return ids


def cmd_rings(args) -> Result:
    if args.f:
        F = GF(args.q)
        try:
            ring = LocalRing(args.q, parse_poly(args.f, F), args.s)
        except ValueError as e:
            raise UsageError(str(e))
    else:
        ring = ring_for(args.q, args.s)
    Q, s = ring.Q, ring.s
    if args.check == "orders":
        rows = [{"kind": k, "Q": Q, "s": s, "formula": group_order(k, Q, s)} for k in KINDS]
        passed = True
        if ring.size ** 9 <= 1 << 22:
            bf = brute_force_orders(ring)
            rows[0]["brute_force"], rows[1]["brute_force"] = bf.gl3, bf.sl3
            passed = bf.ok
        for r in rows:
            r.setdefault("brute_force", "")
        return Result(rows, passed)
    if args.check == "cube-roots":
        mu = count_cube_roots_in(ring) if args.f else count_cube_roots(Q, s)
        return Result([{"Q": Q, "s": s, "mu": mu}], True)
    if args.check == "frobenius":
        rep = frobenius_unipotent_order(Q, s)
        return Result([{"Q": Q, "s": s, "exponent": rep.exponent, "kernel_size": rep.kernel_size,
                        "counterexamples": rep.counterexamples}], rep.ok)
    if args.check == "commuting":
        rep = commuting_pair_bound_check(Q, s, args.mode, args.budget, args.seed)
        return Result([{"Q": Q, "s": s, "bound": rep.bound, "max_found": rep.max_found,
                        "pairs_tested": rep.pairs_tested, "mode": rep.mode,
                        "status": "PASS" if rep.ok else "FAIL"}], rep.ok)
    raise UsageError(f"unknown check {args.check}")


def cmd_density(args) -> Result:
    complex_, n = parse_complex(args.complex)
    cfg = DensityConfig(args.delta, args.trials, args.seed, args.r, args.k, args.ell)
    stats = run_event(complex_, cfg, args.event, n=n)
    return Result([stats.row()], True, stats_to_json([stats]))


def cmd_thresholds(args) -> Result:
    delta = Fraction(repr(args.delta)) if args.delta is not None else None
    probe = threshold_exponent(args.Q, args.s, delta if delta is not None else Fraction(1, 2))
    if delta is None:
        delta = probe.critical_delta
    rep = threshold_exponent(args.Q, args.s, delta)
    row = {k: v for k, v in rep.as_dict().items()}
    row["discrepancy"] = "FLAG" if rep.discrepancy else ""
    if args.q_star is not None:
        fa_delta, stated, flagged = fa_threshold(args.q_star)
        row["fa_delta"], row["fa_stated"] = str(fa_delta), str(stated)
    return Result([row], rep.exponent == 0 if args.delta is None else True)


COMMANDS = {"spectral": cmd_spectral, "rings": cmd_rings, "density": cmd_density,
            "thresholds": cmd_thresholds}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="randbuild", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--manifest", help="write the run manifest here instead of stderr")
    common.set_defaults(format="csv")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectral", parents=[common], help="link spectra of PG(2,q)")
    sp.add_argument("--q", type=_prime_power_arg, required=True)
    sp.add_argument("--remove", help="k (first k flags), or flag ids as a comma list / =id")
    sp.add_argument("--sweep", action="store_true", help="every single-flag removal")
    sp.add_argument("--kmin", type=int, help="minimum lambda0 over k-flag removals")
    sp.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    sp.add_argument("--budget", type=_positive, default=1000)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--solver", choices=["jacobi", "lapack"], default="jacobi")

    rp = sub.add_parser("rings", parents=[common], help="matrix groups over local rings")
    rp.add_argument("--q", type=_prime_power_arg, required=True,
                    help="base field order (the residue order when --f is omitted)")
    rp.add_argument("--f", help='polynomial over F_q, e.g. "y^2+y+1"')
    rp.add_argument("--s", type=_positive, default=1)
    rp.add_argument("--check", choices=["orders", "cube-roots", "commuting", "frobenius"],
                    default="orders")
    rp.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    rp.add_argument("--budget", type=_positive, default=10 ** 5)
    rp.add_argument("--seed", type=int, default=None)

    dp = sub.add_parser("density", parents=[common], help="Monte Carlo density events")
    dp.add_argument("--complex", required=True, help="torus:n or thick:n,t")
    dp.add_argument("--delta", type=_open_delta, required=True)
    dp.add_argument("--event", choices=EVENTS, required=True)
    dp.add_argument("--trials", type=_positive, default=500)
    dp.add_argument("--seed", type=int, required=True)
    dp.add_argument("--r", type=int, default=2)
    dp.add_argument("--k", type=int, default=2)
    dp.add_argument("--ell", type=int, default=3)

    tp = sub.add_parser("thresholds", parents=[common], help="critical densities")
    tp.add_argument("--Q", type=_prime_power_arg, default=2)
    tp.add_argument("--s", type=_positive, required=True)
    tp.add_argument("--delta", type=_open_delta)
    tp.add_argument("--q-star", type=_positive, dest="q_star")

    xp = sub.add_parser("replay", help="re-run a manifest and compare output checksums")
    xp.add_argument("path")
    return p


def _needs_seed(args) -> bool:
    if args.command == "spectral":
        return args.kmin is not None and args.mode == "sampled"
    if args.command == "rings":
        return args.check == "commuting" and args.mode == "sampled"
    return args.command == "density"


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command == "replay":
        code, same = replay(args.path)
        print("checksum match" if same else "checksum MISMATCH", file=sys.stderr)
        return code if same else EXIT_FAIL
    if _needs_seed(args) and args.seed is None:
        parser.print_usage(sys.stderr)
        print("error: --seed is required for stochastic runs", file=sys.stderr)
        return EXIT_USAGE
    params = {k: v for k, v in vars(args).items() if k not in ("out", "manifest", "format")}
    manifest = RunManifest(args.command, params, getattr(args, "seed", None),
                           format=args.format, started=_now(), argv=argv)
    try:
        result = COMMANDS[args.command](args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "json":
        text = result.payload if result.payload is not None else json.dumps(result.rows)
        text += "\n"
    else:
        text = _csv(result.rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    manifest.finished = _now()
    manifest.sha256 = hashlib.sha256(text.encode()).hexdigest()
    manifest.passed = result.passed
    mpath = args.manifest or (args.out + ".manifest.json" if args.out else None)
    if mpath:
        with open(mpath, "w") as fh:
            fh.write(manifest.to_json() + "\n")
    else:
        print(manifest.to_json(), file=sys.stderr)
    return EXIT_OK if result.passed else EXIT_FAIL


def replay(manifest_path: str) -> tuple[int, bool]:
    """Re-run a manifest's argv (output captured) and compare checksums."""
    with open(manifest_path) as fh:
        m = json.load(fh)
    argv = _strip_io_flags(list(m["argv"]))
    buf = io.StringIO()
    old = sys.stdout
    sys.stdout = buf
    try:
        code = main(argv + ["--manifest", manifest_path + ".replay"])
    finally:
        sys.stdout = old
    return code, hashlib.sha256(buf.getvalue().encode()).hexdigest() == m["sha256"]


def _strip_io_flags(argv: list[str]) -> list[str]:
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        if a in ("--out", "--manifest"):
            skip = True
            continue
        out.append(a)
    return out


if __name__ == "__main__":
    sys.exit(main())
