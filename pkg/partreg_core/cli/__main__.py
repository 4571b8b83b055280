"""
partreg CLI: command-line interface for partition-regularity computations.

Usage:
    partreg check-columns --system "x + y = z"
    partreg search-bad --system "x + y = z" -r 2 --window 5
    partreg find-solution --system "x + y = z" --colouring mod:2 --window 20
    partreg sumset-stabilize --set mod:3,1 --window 5000 --mode asymmetric
    partreg solve --family a --colouring mod:3 -n 4
    partreg verify-counterexample iprnz --delta 1/2 --y 1/8 --x 1/8
    partreg selftest --quick

Every command writes a JSON certificate to stdout (or --out) and accepts
--verify FILE to re-check a certificate it emitted earlier.

Exit codes: 0 definitive result, 2 inconclusive at this window size,
1 usage or input error.
"""

import argparse
import sys
from typing import Callable, Dict, Optional, Sequence, Tuple

from partreg_core.cli import commands
from partreg_core.cli.selftest import run_selftest
from partreg_core.config import EngineConfig
from partreg_core.ingestion.specs import STABILIZE_MODES
from partreg_core.logging import configure_logging, get_logger
from partreg_core.outputs.certificates import load_document, write_document
from partreg_core.outputs.reports import generate_markdown_report, save_report
from partreg_core.outputs.verify import verify_document
from partreg_core.validation import (
    ContractViolation,
    Inconclusive,
    InternalError,
    SearchLimits,
    ValidationError,
)

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2

# Certificate kinds each command emits, for --verify.
COMMAND_KINDS: Dict[str, Tuple[str, ...]] = {
    "check-columns": ("columns-certificate",),
    "search-bad": ("bad-colouring",),
    "find-solution": ("mono-solution",),
    "sumset-stabilize": ("stabilization-report", "coset-report"),
    "solve": ("solver-trace",),
    "verify-counterexample": ("mod3-obstruction", "iprnz-violation", "image-expressions"),
    "selftest": ("selftest",),
}

# Options a run needs; optional at parse time so that --verify works alone.
REQUIRED_OPTIONS: Dict[str, Tuple[str, ...]] = {
    "search-bad": ("window",),
    "find-solution": ("colouring", "window"),
    "sumset-stabilize": ("set", "window"),
    "solve": ("family", "colouring", "n"),
    "verify-counterexample": ("which",),
}


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=str, help="Write the JSON result here (default: stdout)")
    common.add_argument("--verify", type=str, metavar="FILE", help="Re-verify a certificate instead of running")
    common.add_argument("--config", type=str, help="YAML file of engine settings")
    common.add_argument(
        "--preset",
        choices=["default", "quick", "thorough"],
        default="default",
        help="Engine preset used when --config is not given (default: settings from environment)",
    )
    common.add_argument("--seed", type=int, help="Seed for randomized routines")
    common.add_argument("--threads", type=int, help="Worker threads for per-class stages")
    common.add_argument(
        "--limits",
        choices=["default", "strict", "relaxed"],
        default="default",
        help="Search caps for columns, nodes and colourings (default: default)",
    )
    common.add_argument(
        "--log-level",
        type=str,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        default="WARNING",
        help="Log level (default: WARNING)",
    )
    common.add_argument("--structured-logs", action="store_true", help="Emit JSON-structured log lines")
    common.add_argument("--quiet", action="store_true", help="Suppress all logging output")
    return common


def _system_options(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--system", type=str, help='Equations, ";"-separated (e.g. "x + y = z")')
    source.add_argument("--system-file", type=str, help='Equation file, one per line ("-" for stdin)')
    source.add_argument("--family", choices=sorted(commands.FAMILIES), help="Generate a family prefix")
    parser.add_argument("-n", type=int, help="Number of family equations (with --family)")
    parser.add_argument("--seq", type=str, help="y-coefficients: pow2, invpow2 or integers c1,c2,...")


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with every subcommand."""
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="partreg",
        description="partreg-core: partition regularity of linear systems on finite windows",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__,
    )
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # check-columns
    columns_parser = subparsers.add_parser(
        "check-columns", parents=[common], help="Decide the columns property of a system's matrix"
    )
    _system_options(columns_parser)
    columns_parser.add_argument("--matrix", type=str, help='Rows ";"-separated, entries ","-separated')
    columns_parser.add_argument(
        "--max-cols", type=int, help="Column cap (default: from --limits)"
    )

    # search-bad
    bad_parser = subparsers.add_parser(
        "search-bad", parents=[common], help="Search an r-colouring of [1..N] with no monochromatic solution"
    )
    _system_options(bad_parser)
    bad_parser.add_argument("-r", type=int, default=2, help="Number of colours (default: 2)")
    bad_parser.add_argument("--window", "-N", type=int, help="Window size N")
    bad_parser.add_argument("--distinct", action="store_true", help="Require distinct values")

    # find-solution
    find_parser = subparsers.add_parser(
        "find-solution", parents=[common], help="Search a colouring for a monochromatic solution"
    )
    _system_options(find_parser)
    find_parser.add_argument("--colouring", type=str, help="Colouring spec (mod:q, sign, level:p, file:PATH)")
    find_parser.add_argument("--window", type=int, help="Numerator window [1..W]")
    find_parser.add_argument("--max-level", type=int, default=0, help="Deepest dyadic level of the domain")
    find_parser.add_argument("--level", type=int, default=0, help="Level the values are taken from")
    find_parser.add_argument("--bound", type=int, help="Largest |numerator| searched")
    find_parser.add_argument("--distinct", action="store_true", help="Require distinct values")

    # sumset-stabilize
    stabilize_parser = subparsers.add_parser(
        "sumset-stabilize", parents=[common], help="Detect stabilization of iterated sumsets"
    )
    stabilize_parser.add_argument("--set", type=str, help="Set spec (mod:q,a | file:PATH | expr:FORMULA)")
    stabilize_parser.add_argument("--window", type=int, help="Window size")
    stabilize_parser.add_argument("--mode", choices=STABILIZE_MODES, default="difference", help="Stabilization mode")
    stabilize_parser.add_argument("--dyadic", action="store_true", help="Same as --mode dyadic")
    stabilize_parser.add_argument("--levels", type=int, default=1, help="Dyadic levels 0..levels-1")
    stabilize_parser.add_argument("--k", type=int, help="k whose A - kA is reported (asymmetric mode)")

    # solve
    solve_parser = subparsers.add_parser(
        "solve", parents=[common], help="Construct a monochromatic solution of System A, B or C"
    )
    solve_parser.add_argument("--family", choices=sorted(commands.FAMILIES), help="System family")
    solve_parser.add_argument("--colouring", type=str, help="Colouring spec")
    solve_parser.add_argument("-n", type=int, help="Number of equations")
    solve_parser.add_argument("--seq", type=str, help="y-coefficients: pow2, invpow2 or c1,c2,...")
    solve_parser.add_argument("--window", type=int, help="Colouring window (default from config)")
    solve_parser.add_argument("--levels", type=int, help="Number of dyadic levels (System B)")
    solve_parser.add_argument("--trace", type=str, help="Also write the solver-trace JSON here")
    solve_parser.add_argument(
        "--format", choices=["json", "markdown"], default="json", help="Output format (default: json)"
    )

    # verify-counterexample
    counter_parser = subparsers.add_parser(
        "verify-counterexample", parents=[common], help="Check the explicit counterexamples"
    )
    counter_parser.add_argument("which", nargs="?", choices=["mod3", "iprnz", "image"], help="Counterexample to check")
    counter_parser.add_argument("--n", "-n", type=int, default=4, help="Largest equation / expression row")
    counter_parser.add_argument("--window", type=int, default=10_000, help="Search window (mod3)")
    counter_parser.add_argument("--residue", type=int, default=1, help="Residue class mod 3 (mod3)")
    counter_parser.add_argument("--delta", type=str, default="1/2", help="Interval half-width (iprnz)")
    counter_parser.add_argument("--y", type=str, default="1/8", help="Value of y")
    counter_parser.add_argument("--x", type=str, default="1/8", help="Value of every x_{i,j}")
    counter_parser.add_argument("--assign", type=str, help="YAML/JSON mapping of variable names to values")
    counter_parser.add_argument("--seq", type=str, help="y-coefficients: pow2, invpow2 or c1,c2,...")

    # selftest
    selftest_parser = subparsers.add_parser(
        "selftest", parents=[common], help="Run the acceptance checks and report pass/fail"
    )
    selftest_parser.add_argument("--quick", action="store_true", help="Reduced windows and sample sizes")

    return parser


RUNNERS: Dict[str, Callable[[argparse.Namespace, EngineConfig, SearchLimits], dict]] = {
    "check-columns": commands.run_check_columns,
    "search-bad": commands.run_search_bad,
    "find-solution": commands.run_find_solution,
    "sumset-stabilize": commands.run_sumset_stabilize,
    "solve": commands.run_solve,
    "verify-counterexample": commands.run_verify_counterexample,
}


def _engine_config(args: argparse.Namespace) -> EngineConfig:
    if args.config:
        config = EngineConfig.from_yaml(args.config)
    elif args.preset == "quick" or (args.preset == "default" and getattr(args, "quick", False)):
        config = EngineConfig.quick()
    elif args.preset == "thorough":
        config = EngineConfig.thorough()
    else:
        config = EngineConfig.from_env()
    if args.seed is not None:
        config.seed = args.seed
    if args.threads is not None:
        config.threads = args.threads
    return config


def run_verify(args: argparse.Namespace) -> int:
    """Re-verify a certificate file against the command that emits its kind."""
    document = load_document(args.verify)
    result = verify_document(document)
    if document["kind"] not in COMMAND_KINDS[args.command]:
        result.fail("kind", f"{args.command} does not emit {document['kind']!r}")
    write_document({"schema": "v1", "kind": document["kind"], "verification": result.to_dict()}, args.out)
    if not result.valid:
        print(f"Verification failed: {'; '.join(result.failures)}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def dispatch(args: argparse.Namespace) -> int:
    """Run the selected command and map its outcome to an exit code."""
    if args.verify:
        return run_verify(args)

    missing = [name for name in REQUIRED_OPTIONS.get(args.command, ()) if getattr(args, name) is None]
    if missing:
        flags = ", ".join(f"-{name}" if name == "n" else f"--{name}" for name in missing)
        raise ContractViolation(f"{args.command} needs {flags}")

    config = _engine_config(args)
    limits = {"strict": SearchLimits.strict, "relaxed": SearchLimits.relaxed}.get(args.limits, SearchLimits)()
    if args.command == "selftest":
        document = run_selftest(config, quick=args.quick)
        write_document(document, args.out)
        return EXIT_OK if document["passed"] else EXIT_ERROR

    document = RUNNERS[args.command](args, config, limits)
    if args.command == "solve":
        if args.trace:
            write_document(document, args.trace)
        if args.format == "markdown":
            if args.out:
                save_report(document, args.out, format="markdown")
            else:
                print(generate_markdown_report(document))
            return EXIT_OK
    write_document(document, args.out)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as e:
        # argparse exits 2 on usage errors; 2 is reserved for inconclusive runs
        return EXIT_OK if e.code in (0, None) else EXIT_ERROR

    if args.command is None:
        parser.print_help()
        return EXIT_ERROR

    if args.quiet:
        configure_logging(level="CRITICAL")
    else:
        configure_logging(level=args.log_level, structured=args.structured_logs)

    try:
        return dispatch(args)
    except Inconclusive as e:
        print(f"Inconclusive ({e.stage}): {e}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (ValidationError, OSError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except InternalError as e:
        logger.error(f"Internal error: {e}")
        print(f"Internal error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
