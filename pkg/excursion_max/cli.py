"""
Command line front end: `excursion-max score|simulate|analytic|verify|schema`

Reports are written to stdout, logs to stderr. Exit codes: 0 success, 2 input or parameter error, 3 numeric
non-convergence, 4 verification failure.
"""

import argparse
import logging
import sys
from collections.abc import Sequence
from dataclasses import asdict

from excursion_max.eval_conf import EvalControl, StepLaw, WalkConfig
from excursion_max.exceptions import EXIT_NON_CONVERGENCE, EXIT_OK, ExcursionMaxError, exit_code_for
from excursion_max.path_engine import estimate_pc_n, estimate_pc_n_sweep, local_score_stats
from excursion_max.pc_routes import ANALYTIC_CONTROL, build_report
from excursion_max.reports import TOOL_VERSION, ReportDocument, report_json_schema
from excursion_max.score_parser import STDIN_SOURCE, read_scores
from excursion_max.verification import raise_on_failure, run_identity_suites

logger = logging.getLogger("excursion_max")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
ANALYTIC_ROUTES = ("r1_closed_form", "r2_lemma_integral", "r3_expectation", "r6_split_integrals", "alpha_check")
# walks of the analytic report, smaller than the simulate defaults
ANALYTIC_MC_N = 1_000
ANALYTIC_MC_PATHS = 20_000


def parse_sweep(raw_value: str) -> list[int]:
    """Parse a comma separated list of walk lengths such as "100,1000,10000" """
    try:
        ns = [int(item) for item in raw_value.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid walk lengths: '{raw_value}'") from None
    if not ns:
        raise argparse.ArgumentTypeError("at least one walk length is required")
    return ns


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json", help="Report format (default: json)")
    common.add_argument("-v", "--verbose", action="store_true", help="Log debug messages on stderr")

    walk = argparse.ArgumentParser(add_help=False)
    walk.add_argument("--n", type=int, default=10_000, help="Walk length (default: %(default)s)")
    walk.add_argument("--paths", type=int, default=200_000, help="Number of simulated paths (default: %(default)s)")
    walk.add_argument("--seed", type=int, default=0, help="Unsigned 64-bit seed (default: 0)")
    walk.add_argument(
        "--step-law", choices=[law.value for law in StepLaw], default=StepLaw.RADEMACHER.value, help="Law of the steps"
    )
    walk.add_argument(
        "--workers", type=int, default=None, help="Worker processes (default: $EXCURSION_MAX_THREADS or 1)"
    )

    tolerance = argparse.ArgumentParser(add_help=False)
    tolerance.add_argument(
        "--tol", type=float, default=ANALYTIC_CONTROL.rel_tol, help="Relative tolerance of the analytic evaluations"
    )

    parser = argparse.ArgumentParser(
        prog="excursion-max",
        description="Probability that the maximum of a reflected walk is reached on a complete excursion",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    score = subparsers.add_parser("score", parents=[common], help="Local score statistics of a score sequence")
    score.add_argument("--input", default=STDIN_SOURCE, help="Newline-delimited scores, '-' for stdin (default: -)")
    score.set_defaults(handler=cmd_score)

    simulate = subparsers.add_parser("simulate", parents=[common, walk], help="Monte Carlo estimate of p_c^(n)")
    simulate.add_argument("--sweep", type=parse_sweep, default=None, help="Comma separated walk lengths")
    simulate.set_defaults(handler=cmd_simulate)

    analytic = subparsers.add_parser(
        "analytic", parents=[common, walk, tolerance], help="Every route to p_c and their discrepancies"
    )
    analytic.add_argument("--no-mc", action="store_true", help="Skip both Monte Carlo routes")
    analytic.set_defaults(handler=cmd_analytic, n=ANALYTIC_MC_N, paths=ANALYTIC_MC_PATHS)

    verify = subparsers.add_parser("verify", parents=[common, tolerance], help="Run the identity suites")
    verify.add_argument("--seed", type=int, default=0, help="Seed of the random arguments (default: 0)")
    verify.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    verify.set_defaults(handler=cmd_verify)

    schema = subparsers.add_parser("schema", help="Print the JSON schema of the reports")
    schema.set_defaults(handler=None, verbose=False)
    return parser


def walk_config(args: argparse.Namespace) -> WalkConfig:
    return WalkConfig(
        n=args.n,
        step_law=args.step_law,
        seed=args.seed,
        paths=args.paths,
        workers=-1 if args.workers is None else args.workers,
    )


def eval_control(args: argparse.Namespace) -> EvalControl:
    return ANALYTIC_CONTROL.replace(rel_tol=args.tol)


def cmd_score(args: argparse.Namespace) -> tuple[ReportDocument, int]:
    scores = read_scores(args.input)
    summary = local_score_stats(scores.values)
    document = ReportDocument(
        command="score",
        inputs={"source": scores.source, "header": scores.header, "length": len(scores.values)},
        results=asdict(summary),
    )
    return document, EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> tuple[ReportDocument, int]:
    cfg = walk_config(args)
    # workers are left out of the inputs, reports do not depend on them
    inputs = {"n": cfg.n, "paths": cfg.paths, "step_law": cfg.step_law.value}
    if args.sweep is None:
        results = asdict(estimate_pc_n(cfg))
    else:
        inputs["sweep"] = args.sweep
        results = {"sweep": [asdict(estimate) for estimate in estimate_pc_n_sweep(cfg, args.sweep)]}
    return ReportDocument(command="simulate", inputs=inputs, results=results, seed=cfg.seed), EXIT_OK


def cmd_analytic(args: argparse.Namespace) -> tuple[ReportDocument, int]:
    ctl = eval_control(args)
    inputs = {"rel_tol": ctl.rel_tol, "abs_tol": ctl.abs_tol, "with_mc": not args.no_mc}
    cfg = None
    if not args.no_mc:
        cfg = walk_config(args)
        inputs.update(n=cfg.n, paths=cfg.paths, step_law=cfg.step_law.value)

    report = build_report(cfg, ctl=ctl)
    failed_analytic = [route for route in ANALYTIC_ROUTES if route in report.failures]
    exit_code = EXIT_NON_CONVERGENCE if failed_analytic else EXIT_OK
    document = ReportDocument(
        command="analytic", inputs=inputs, results=report.to_dict(), seed=None if cfg is None else cfg.seed
    )
    return document, exit_code


def cmd_verify(args: argparse.Namespace) -> tuple[ReportDocument, int]:
    checks = run_identity_suites(eval_control(args), seed=args.seed, inject_fault=args.inject_fault)
    document = ReportDocument(
        command="verify",
        inputs={"rel_tol": args.tol},
        results={"identities": [asdict(check) for check in checks], "passed": all(c.passed for c in checks)},
        seed=args.seed,
    )
    try:
        raise_on_failure(checks)
    except ExcursionMaxError as exc:
        logger.error("%s", exc)
        return document, exit_code_for(exc)
    return document, EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    """
    Entry point of the `excursion-max` console script

    Params:
        argv: Command line arguments without the program name. By default, sys.argv[1:].

    Returns:
        The process exit code.
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.DEBUG if args.verbose else logging.WARNING, format=LOG_FORMAT)

    if args.handler is None:
        print(report_json_schema())
        return EXIT_OK

    try:
        document, exit_code = args.handler(args)
    except (ValueError, ArithmeticError) as exc:
        logger.error("%s failed: %s", args.command, exc)
        return exit_code_for(exc)

    print(document.to_text() if args.format == "text" else document.to_json())
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
