"""Command line interface.

Exit codes: 0 success, 2 when no decomposition was found, 1 on bad input
or internal failure.  Diagnostics go to stderr; the report goes to stdout
unless ``--output`` is given.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .commutant import block_diagonalize_invertible
from .diagonalize import block_diagonalize_unitary
from .errors import NoDecompositionFound, SimBlockError
from .invariant import SearchConfig
from .io import dumps_report, format_report_text, load_report, parse_matrix_set
from .linalg import Tolerances
from .triangularize import block_triangularize
from .verify import validate_report

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_FOUND = 2

ALGORITHMS = {
    "triangularize": block_triangularize,
    "diag-unitary": block_diagonalize_unitary,
    "diag-invertible": block_diagonalize_invertible,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="matrix set (JSON)")
    common.add_argument("--tol", type=float, default=1e-10, help="relative rank cutoff")
    common.add_argument("--residual-tol", type=float, default=1e-8,
                        help="absolute bound on entries required to vanish")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=8,
                        help="random combinations tried per search")
    common.add_argument("--output", "-o", help="write the result here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--verbose", "-v", action="store_true")

    parser = argparse.ArgumentParser(
        prog="simblock",
        description="Simultaneous block triangularization / diagonalization of matrix sets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("triangularize", parents=[common],
                   help="unitary block triangularization via invariant subspaces")
    sub.add_parser("diag-unitary", parents=[common],
                   help="unitary block diagonalization via the adjoint-closed set")
    sub.add_parser("diag-invertible", parents=[common],
                   help="invertible block diagonalization via a commuting matrix")
    verify = sub.add_parser("verify", parents=[common], help="re-check a report against its input")
    verify.add_argument("--report", required=True, help="report JSON produced by this tool")
    return parser


def _emit(text: str, output):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _verify(args, mats, tol) -> int:
    report = load_report(args.report)
    if report.names and list(report.names) != list(mats.names):
        print(f"error: report names {report.names} do not match input {mats.names}", file=sys.stderr)
        return EXIT_ERROR
    result = validate_report(mats.matrices, report, tol)
    if args.format == "json":
        payload = {"ok": result.ok, "reasons": result.reasons, "residuals": result.residuals}
        _emit(json.dumps(payload, indent=1) + "\n", args.output)
    else:
        lines = ["PASS" if result.ok else "FAIL"] + [f"  {r}" for r in result.reasons]
        _emit("\n".join(lines) + "\n", args.output)
    for reason in result.reasons:
        print(f"verify: {reason}", file=sys.stderr)
    return EXIT_OK if result.ok else EXIT_ERROR


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(name)s: %(message)s")
    try:
        tol = Tolerances(rank_tol=args.tol, residual_tol=args.residual_tol)
        cfg = SearchConfig(rng_seed=args.seed, n_seed_combinations=args.trials)
        mats = parse_matrix_set(args.file)
        if args.command == "verify":
            return _verify(args, mats, tol)
        report = ALGORITHMS[args.command](mats.matrices, cfg, tol, names=mats.names)
    except NoDecompositionFound as exc:
        print(f"no decomposition found: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (SimBlockError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    text = dumps_report(report) if args.format == "json" else format_report_text(report)
    _emit(text, args.output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
