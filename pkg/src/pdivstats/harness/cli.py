"""Command-line entry point: ``pdivstats <kind> [options]``."""

from __future__ import annotations

import argparse
import sys

from ..errors import BudgetExceeded, InvalidSpec
from .runner import KINDS, STATS, ExperimentSpec, run
from .tables import emit

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_BUDGET, EXIT_IO = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pdivstats", description="Statistics of p-torsion invariants: random "
                 "Dieudonne modules, hyperelliptic and plane curves over finite fields.")
    ap.add_argument("kind", choices=KINDS)
    ap.add_argument("--p", type=int, default=3, help="characteristic")
    ap.add_argument("--m", type=int, default=1, help="extension degree (q = p^m)")
    ap.add_argument("--genus", type=int)
    ap.add_argument("--degree", type=int)
    ap.add_argument("--samples", type=int)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int)
    ap.add_argument("--stat", action="append", choices=STATS, dest="stats",
                    help="statistic to tabulate (repeatable; default a)")
    ap.add_argument("--out", help="output path (default stdout)")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--degree-parity", choices=("odd", "even"), default="odd",
                    help="hyperelliptic: deg f = 2g+1 or 2g+2")
    ap.add_argument("--tol", type=float, default=1e-9, help="precision of limit constants")
    ap.add_argument("--budget", type=int, default=10 ** 9, help="cap on exhaustive enumeration")
    ap.add_argument("--backend", choices=("numba", "numpy"))
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = ExperimentSpec(
            kind=args.kind, p=args.p, m=args.m, genus=args.genus, degree=args.degree,
            samples=args.samples, seed=args.seed, threads=args.threads,
            stats=tuple(args.stats or ("a",)), fmt=args.format,
            degree_parity=args.degree_parity, tol=args.tol, budget=args.budget,
            backend=args.backend)
        table = run(spec)
    except InvalidSpec as exc:
        print(f"invalid experiment: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    try:
        if args.out:
            emit(table, args.format, args.out)
        else:
            emit(table, args.format, sys.stdout)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    for c in table.chi:
        print(f"chi-square[{c.statistic}] = {float(c.value):.4g}, dof {c.dof}, p = {c.p_value:.3g}",
              file=sys.stderr)
    if table.kind == "selftest" and not all(r.count for r in table.rows):
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
