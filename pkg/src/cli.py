"""
Command-line interface.

Exit codes: 0 success, 1 usage error, 2 failed check or counterexample,
3 inconclusive (search budget exhausted or incomplete).
"""
import argparse
import logging
import sys
from fractions import Fraction
from typing import List, Optional

from src import __version__
from src.experiments.runner import (
    EXIT_FAILURE,
    EXIT_INCONCLUSIVE,
    EXIT_OK,
    EXIT_USAGE,
    TENSOR_CHECKS,
    ExperimentResult,
    exit_code_for,
    run_experiment,
)
from src.sources.batch import BatchRunner, batch_exit_code, load_manifest
from src.sources.catalog import catalog_entries, get_catalog
from src.sources.file_source import emit_lattice
from src.sources.reports import ReportDocument, reload_and_reverify
from src.sources.resolver import resolve_lattice
from src.utils.config import get_config, override_config
from src.utils.errors import BudgetExhausted, InvariantViolation, SlopeforgeError
from src.utils.logger import init_logging_from_config

logger = logging.getLogger(__name__)


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _global_flags(parser: argparse.ArgumentParser, default) -> None:
    parser.add_argument("--budget-nodes", type=_positive, default=default, help="node budget per search")
    parser.add_argument("--rank-cap", type=_positive, default=default, help="largest tensor rank to enumerate")
    parser.add_argument("--uncertified-radius", type=_fraction, default=default,
                        help="radius multiplier replacing the certified bound (results marked uncertified)")
    parser.add_argument("--threads", type=_positive, default=default, help="worker threads")
    parser.add_argument("--out", default=default, help="write a JSON report")
    parser.add_argument("-v", "--verbose", action="count", default=default,
                        help="print every check and lower the log level (-v info, -vv debug)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slopeforge",
        description="Exact slope filtrations, Rankin minima and isoduality of rational Gram lattices.",
    )
    parser.add_argument("--version", action="version", version=f"slopeforge {__version__}")
    _global_flags(parser, None)
    parser.set_defaults(verbose=0)

    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, argparse.SUPPRESS)

    sub = parser.add_subparsers(dest="command", required=True)
    lattice_help = "catalog name or lattice file"

    for name, text in (
        ("analyze", "filtration, Rankin profile and isoduality"),
        ("filtration", "Grayson-Stuhler filtration"),
        ("aut", "automorphism group and invariance of the filtration"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--in", dest="lattice", required=True, help=lattice_help)

    p = sub.add_parser("rankin", parents=[common], help="Rankin minima d_k")
    p.add_argument("--in", dest="lattice", required=True, help=lattice_help)
    p.add_argument("--max-rank", type=_positive, default=None)

    p = sub.add_parser("isodual", parents=[common], help="isoduality witness, pairing types and checks")
    p.add_argument("--in", dest="lattice", required=True, help=lattice_help)
    sweep = p.add_mutually_exclusive_group()
    sweep.add_argument("--sweep", dest="sweep", action="store_true", default=None,
                       help="sweep the whole coset of witnesses")
    sweep.add_argument("--no-sweep", dest="sweep", action="store_false", help="classify the first witnesses only")

    p = sub.add_parser("tensor", parents=[common], help="multiplicativity of H_min and reduction checks")
    p.add_argument("--a", required=True, help=lattice_help)
    p.add_argument("--b", required=True, help=lattice_help)
    for check in TENSOR_CHECKS:
        p.add_argument(f"--check-{check}", action="append_const", const=check, dest="checks",
                       help=f"run the {check} check")

    p = sub.add_parser("polygon", parents=[common], help="canonical polygon as CSV and SVG")
    p.add_argument("--in", dest="lattice", required=True, help=lattice_help)
    p.add_argument("--svg", default=None)
    p.add_argument("--csv", default=None)

    p = sub.add_parser("batch", parents=[common], help="run a manifest of experiments")
    p.add_argument("--manifest", required=True)
    p.add_argument("--no-progress", action="store_true")

    p = sub.add_parser("catalog", parents=[common], help="list built-in lattices or print one as a lattice file")
    p.add_argument("name", nargs="?")

    p = sub.add_parser("reverify", parents=[common], help="re-check every witness in a report")
    p.add_argument("--report", required=True)
    return parser


def _print_result(result: ExperimentResult, verbose: int) -> None:
    print(result.summary)
    for report in result.reports:
        for check in report.checks:
            if verbose or not check.passed:
                detail = f": {check.detail}" if check.detail else ""
                stream = sys.stdout if check.passed else sys.stderr
                print(f"  [{check.status}] {report.title} / {check.name}{detail}", file=stream)
    if result.counterexample:
        print("!!! counterexample found and re-verified; see the report witnesses", file=sys.stderr)


def _save(args: argparse.Namespace, results: List[ExperimentResult]) -> None:
    if not args.out:
        return
    document = ReportDocument(command=args.command, settings=get_config().to_dict())
    for result in results:
        document.add(result)
    document.finalize()
    document.save(args.out)


def _experiment(args: argparse.Namespace, kind: str, **options) -> int:
    if kind == "tensor":
        a, b = resolve_lattice(args.a), resolve_lattice(args.b)
    else:
        a, b = resolve_lattice(args.lattice), None
    result = run_experiment(kind, a, b, **options)
    _print_result(result, args.verbose)
    _save(args, [result])
    return result.exit_code


def cmd_analyze(args: argparse.Namespace) -> int:
    return _experiment(args, "analyze")


def cmd_filtration(args: argparse.Namespace) -> int:
    return _experiment(args, "filtration")


def cmd_rankin(args: argparse.Namespace) -> int:
    return _experiment(args, "rankin", max_rank=args.max_rank)


def cmd_isodual(args: argparse.Namespace) -> int:
    return _experiment(args, "isodual", sweep=args.sweep)


def cmd_aut(args: argparse.Namespace) -> int:
    return _experiment(args, "aut")


def cmd_tensor(args: argparse.Namespace) -> int:
    return _experiment(args, "tensor", checks=args.checks or ["bost"])


def cmd_polygon(args: argparse.Namespace) -> int:
    return _experiment(args, "polygon", svg=args.svg, csv=args.csv)


def cmd_batch(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    report_path = args.out or get_config().batch.report_path
    document = BatchRunner(manifest, report_path).run(show_progress=not args.no_progress)
    for result in document.results:
        print(f"{result.get('label', result['kind'])}: {result['status']}")
        if result.get("error"):
            print(f"  {result['error']}", file=sys.stderr)
    return batch_exit_code(document)


def cmd_catalog(args: argparse.Namespace) -> int:
    if args.name:
        entry = get_catalog().fetch(args.name)
        sys.stdout.write(emit_lattice(entry.lattice, entry.name))
        return EXIT_OK
    for entry in catalog_entries():
        print(f"{entry.name:<16} rank {entry.lattice.rank:<2} det {str(entry.lattice.det):<6} {entry.description}")
    return EXIT_OK


def cmd_reverify(args: argparse.Namespace) -> int:
    report = reload_and_reverify(args.report)
    print(f"{report.title}: {report.status} ({len(report.checks)} checks)")
    for check in report.checks:
        if args.verbose or not check.passed:
            print(f"  [{check.status}] {check.name}")
    return exit_code_for(report.status)


COMMANDS = {
    "analyze": cmd_analyze,
    "filtration": cmd_filtration,
    "rankin": cmd_rankin,
    "isodual": cmd_isodual,
    "aut": cmd_aut,
    "tensor": cmd_tensor,
    "polygon": cmd_polygon,
    "batch": cmd_batch,
    "catalog": cmd_catalog,
    "reverify": cmd_reverify,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        init_logging_from_config(verbosity=args.verbose or 0, force=bool(args.verbose))
        override_config(
            budget_nodes=args.budget_nodes,
            rank_cap=args.rank_cap,
            uncertified_radius=args.uncertified_radius,
            threads=args.threads,
        )
        return COMMANDS[args.command](args)
    except BudgetExhausted as e:
        print(f"inconclusive: {e}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except InvariantViolation as e:
        print(f"FAILED: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except SlopeforgeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
