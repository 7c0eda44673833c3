"""Command-line entry point: ``ranksync run | bounds | verify``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .core import DomainError
from .harness import PROTOCOLS, SUITES, ExactnessFailure, ExperimentConfig, run_experiment, verify_small_n
from .protocols import BoundKind, bound, bound_variance

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_EXACTNESS = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ranksync", description="Permutation synchronization protocols and experiments.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="Monte Carlo experiment for one protocol")
    run.add_argument("--protocol", required=True, choices=PROTOCOLS)
    run.add_argument("--n", type=int, required=True)
    run.add_argument("--d", type=int)
    run.add_argument("--trials", type=int, default=1000)
    run.add_argument("--seed", type=int, default=1)
    run.add_argument("--accounting", choices=("ideal", "wire", "both"), default="both")
    run.add_argument("--format", choices=("csv", "json"), default="json")
    run.add_argument("--out", help="write the report here instead of stdout")
    run.add_argument("--dump-transcripts", metavar="PATH", help="write every message of every trial")
    run.add_argument("--budget-tr", type=float, help="forward link budget in bits per session")
    run.add_argument("--budget-rt", type=float, help="feedback link budget in bits per session")

    bnd = sub.add_parser("bounds", help="evaluate a reference bound")
    bnd.add_argument("--kind", required=True, choices=[k.value for k in BoundKind])
    bnd.add_argument("--n", type=int, required=True)
    bnd.add_argument("--d", type=int)

    ver = sub.add_parser("verify", help="exhaustive small-n property checks")
    ver.add_argument("--suite", required=True, choices=SUITES)
    ver.add_argument("--n-max", type=int, required=True)
    return parser


def _run(args) -> int:
    cfg = ExperimentConfig(
        protocol=args.protocol,
        n=args.n,
        d=args.d,
        trials=args.trials,
        seed=args.seed,
        accounting=args.accounting,
        format=args.format,
        out=args.out,
        dump_transcripts=args.dump_transcripts,
        budget_tr=args.budget_tr,
        budget_rt=args.budget_rt,
    )
    try:
        stats = run_experiment(cfg)
    except ExactnessFailure as exc:
        print(f"exactness failure: {exc}", file=sys.stderr)
        print(json.dumps(exc.bundle, sort_keys=True), file=sys.stderr)
        return EXIT_EXACTNESS
    text = stats.to_json() if cfg.format == "json" else stats.to_csv()
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _bounds(args) -> int:
    value = bound(args.kind, args.n, args.d)
    var = bound_variance(args.kind, args.n, args.d)
    print(f"{args.kind}(n={args.n}{'' if args.d is None else f', d={args.d}'}) = {value:.12g}")
    if var is not None:
        print(f"variance = {var:.12g}")
    return EXIT_OK


def _verify(args) -> int:
    report = verify_small_n(args.suite, args.n_max)
    for line in report.lines():
        print(line)
    print("PASS" if report.passed else "FAIL")
    return EXIT_OK if report.passed else EXIT_EXACTNESS


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handler = {"run": _run, "bounds": _bounds, "verify": _verify}[args.command]
    try:
        return handler(args)
    except (ValueError, DomainError) as exc:
        print(f"ranksync: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
