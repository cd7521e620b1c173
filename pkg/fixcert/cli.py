"""
FixCert command line

Technical Explanation:
- argparse front end with one subcommand per operation:
  certify, solve, oracle, catalog, conditions, validate
- Reports go to stdout (text by default, --format structured for JSON);
  logs and errors go to stderr
- Exit status: 0 success / verified, 2 when a counterexample or an
  unconfirmed conclusion was found, 1 on errors (bad config, bad flags)

Usage:
    python -m fixcert solve --config configs/example_3_4.cfg
    python -m fixcert conditions --contraction nonlinear-quasi:rho=0.4
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from fixcert.core.config import settings
from fixcert.core.exceptions import FixCertException
from fixcert.core.logging_config import configure_logging
from fixcert.models.contraction import GridSpec
from fixcert.services.contraction import ContractionService
from fixcert.services.hypotheses import HypothesisService
from fixcert.services.problem import Problem, ProblemService
from fixcert.services.render import (
    catalog_view,
    render_catalog,
    render_conditions,
    render_oracle,
    render_report,
    render_trace,
    render_validation,
    structured,
)
from fixcert.services.spaces import SpaceService

logger = logging.getLogger("fixcert.cli")

DIRECTION_CHOICES = ("inc", "dec", "either", "mono", "increasing", "decreasing", "monotone")
EXIT_OK, EXIT_ERROR, EXIT_FOUND = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="problem config file")
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ...")
    common.add_argument("--contraction", help="catalog entry as ID or ID:name=value,...")

    run = argparse.ArgumentParser(add_help=False)
    run.add_argument("--direction", choices=DIRECTION_CHOICES)
    run.add_argument("--budget", type=int)
    run.add_argument("--x0", help="initial point (label, index or real)")

    parser = argparse.ArgumentParser(prog="fixcert", description="Common fixed point certification toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    certify = sub.add_parser("certify", parents=[common, run], help="check a theorem variant's hypotheses")
    certify.add_argument("--variant")
    certify.add_argument("--no-confirm", action="store_true", help="skip running the solver on the conclusion")

    solve = sub.add_parser("solve", parents=[common, run], help="run the T-S-sequence")
    solve.add_argument("--eps", type=float, action="append", help="Cauchy check threshold (repeatable)")

    oracle = sub.add_parser("oracle", parents=[common], help="brute-force coincidence points")
    oracle.add_argument("--limit", type=int, help="largest index examined on indexed spaces")

    sub.add_parser("catalog", parents=[common], help="list the implicit-contraction catalog")
    conditions = sub.add_parser("conditions", parents=[common], help="check F1a, F1b, F1c and F2 for a contraction")
    conditions.add_argument("--grid-points", type=int)
    sub.add_parser("validate", parents=[common], help="check the metric and order axioms of the space")
    return parser


def _problem(args: argparse.Namespace) -> Problem:
    if not args.config:
        raise FixCertException("--config is required for this command", status_code=400, exit_code=EXIT_ERROR)
    problem = ProblemService.load(args.config)
    if args.contraction:
        problem = problem.with_overrides(contraction=ProblemService.contraction_from_spec(args.contraction))
    return ProblemService.with_run_overrides(
        problem,
        direction=getattr(args, "direction", None),
        budget=getattr(args, "budget", None),
        x0=getattr(args, "x0", None),
        variant=getattr(args, "variant", None),
    )


def _emit(args: argparse.Namespace, text: str, **parts) -> None:
    sys.stdout.write(structured(**parts) + "\n" if args.format == "structured" else text)


def cmd_certify(args: argparse.Namespace) -> int:
    report = ProblemService.certify(_problem(args), confirm=not args.no_confirm)
    _emit(args, render_report(report), report=report)
    confirmed = report.conclusion is None or report.conclusion.confirmed
    return EXIT_OK if report.overall == "verified" and confirmed else EXIT_FOUND


def cmd_solve(args: argparse.Namespace) -> int:
    result = ProblemService.solve(_problem(args), args.eps)
    _emit(
        args,
        render_trace(result.trace, result.fixed_point, result.cauchy, error=result.error),
        trace=result.trace,
        fixed_point=result.fixed_point,
        cauchy=result.cauchy or None,
        error=result.error,
    )
    return EXIT_OK if result.fixed_point is not None else EXIT_FOUND


def cmd_oracle(args: argparse.Namespace) -> int:
    problem = _problem(args)
    oracle = HypothesisService.coincidence_points_bruteforce(problem.space, problem.require_pair(), args.limit)
    _emit(args, render_oracle(oracle), oracle=oracle)
    return EXIT_OK


def cmd_catalog(args: argparse.Namespace) -> int:
    views = [catalog_view(ic) for ic in ContractionService.catalog()]
    _emit(args, render_catalog(views), catalog=views)
    return EXIT_OK


def cmd_conditions(args: argparse.Namespace) -> int:
    if args.contraction:
        ic = ProblemService.contraction_from_spec(args.contraction)
    elif args.config:
        ic = ProblemService.load(args.config).require_contraction()
    else:
        raise FixCertException("conditions needs --contraction or --config", status_code=400)
    grid = GridSpec(points=args.grid_points) if args.grid_points else GridSpec()
    reports = ContractionService.check_contraction(ic, grid)
    _emit(args, render_conditions(ic, reports), contraction=catalog_view(ic), conditions=reports)
    return EXIT_FOUND if any(r.verdict == "counterexample" for r in reports) else EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    report = SpaceService.validate_space(_problem(args).space)
    _emit(args, render_validation(report), validation=report)
    return EXIT_OK if report.valid else EXIT_FOUND


COMMANDS = {
    "certify": cmd_certify,
    "solve": cmd_solve,
    "oracle": cmd_oracle,
    "catalog": cmd_catalog,
    "conditions": cmd_conditions,
    "validate": cmd_validate,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # usage errors exit 1, --help and --version exit 0
        return EXIT_ERROR if exc.code else EXIT_OK
    configure_logging(args.log_level)
    logger.debug("fixcert %s with %s", args.command, vars(args))
    try:
        return COMMANDS[args.command](args)
    except FixCertException as exc:
        logger.debug("command failed", exc_info=True)
        sys.stderr.write(f"error: {exc.message}\n")
        return exc.exit_code


def main() -> int:
    return run(sys.argv[1:])

