"""
sg-alg command line.

  sg-alg validate GAME
  sg-alg solve GAME --beta 1/2 [--mode unnormalized] [--precision 1e-9] [--emit-system] [--emit-groebner]
  sg-alg iterate GAME --beta 1/2 [--tol 1e-9] [--mode ...]
  sg-alg limit GAME [--precision ...] [--kmax 6]
  sg-alg matrix-value MATRIX

Every command takes --json and --timings. Exit codes: 0 success, 1 usage,
2 parse/validation, 3 solver ambiguity, 4 internal cap exceeded.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from typing import List, Optional

from .algsolve import solve_discounted
from .config import Settings, configure_logging, load_settings
from .errors import SgAlgError, UsageError
from .game import Mode, classify, parse_game, parse_matrix, shift_rewards, unshift_value
from .limit import BetaSchedule, solve_limit
from .matrix_game import solve_matrix_game
from .report import (
    estimate_document,
    limit_document,
    matrix_document,
    render,
    solve_document,
    validate_document,
)
from .shapley import Bounds, DiscountFactor, ValueEstimate, value_iteration

log = logging.getLogger("sgalg.cli")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _emit(doc, args) -> None:
    sys.stdout.write(render(doc, as_json=args.json))


def cmd_validate(args, settings: Settings) -> int:
    g = parse_game(_read(args.game))
    _emit(validate_document(args.game, g, classify(g)), args)
    return 0


def cmd_solve(args, settings: Settings) -> int:
    if args.beta is None:
        raise UsageError("solve needs --beta")
    g = parse_game(_read(args.game))
    beta = DiscountFactor.parse(args.beta).beta
    report = solve_discounted(g, beta, args.mode, settings.precision, settings)
    _emit(solve_document(args.game, report, args.emit_system, args.emit_groebner, args.timings), args)
    return 0


def cmd_iterate(args, settings: Settings) -> int:
    if args.beta is None:
        raise UsageError("iterate needs --beta")
    g = parse_game(_read(args.game))
    beta = DiscountFactor.parse(args.beta).beta
    shifted, shift = shift_rewards(g)
    est = value_iteration(shifted, beta, args.mode, settings.tol, bounds=args.bounds, workers=settings.workers)
    values = tuple(unshift_value(v, shift.c, args.mode, beta) for v in est.estimate)
    est = ValueEstimate(values, est.residual, est.error_bound, est.mode, est.beta, est.iterations, est.bounds)
    _emit(estimate_document(args.game, est, shift.c), args)
    return 0


def cmd_limit(args, settings: Settings) -> int:
    g = parse_game(_read(args.game))
    if args.kmax is not None:
        settings = settings.with_overrides(kmax=args.kmax, kmax_cap=max(settings.kmax_cap, args.kmax))
    schedule = BetaSchedule(settings.k0, settings.kmax)
    report = solve_limit(g, settings.precision, settings, schedule)
    _emit(limit_document(args.game, report, args.emit_system, args.timings), args)
    return 0


def cmd_matrix_value(args, settings: Settings) -> int:
    A = parse_matrix(_read(args.matrix))
    _emit(matrix_document(args.matrix, A, solve_matrix_game(A)), args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sg-alg", description="Exact algebraic solver for zero-sum stochastic games"
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the report as JSON")
    common.add_argument("--timings", action="store_true", help="include phase timings")

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--beta", help="discount factor num/den in (0, 1)")
    solver.add_argument("--mode", choices=Mode.ALL, default=Mode.NORMALIZED)
    solver.add_argument("--precision", type=_fraction, help="width of reported intervals")
    solver.add_argument("--tol", type=_fraction, help="value-iteration tolerance")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="parse and check a game file")
    p.add_argument("game")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("solve", parents=[common, solver], help="discounted values with certificates")
    p.add_argument("game")
    p.add_argument("--emit-system", action="store_true", help="print f_1..f_N")
    p.add_argument("--emit-groebner", action="store_true", help="print the elimination bases")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("iterate", parents=[common, solver], help="value iteration with error bounds")
    p.add_argument("game")
    p.add_argument("--bounds", choices=Bounds.ALL, default=Bounds.SUP)
    p.set_defaults(handler=cmd_iterate)

    p = sub.add_parser("limit", parents=[common], help="limiting-average values")
    p.add_argument("game")
    p.add_argument("--precision", type=_fraction, help="width of reported intervals")
    p.add_argument("--tol", type=_fraction, help="value-iteration tolerance")
    p.add_argument("--kmax", type=int, help="largest k in the schedule 1 - 10^-k")
    p.add_argument("--emit-system", action="store_true", help="print f_1..f_N")
    p.set_defaults(handler=cmd_limit)

    p = sub.add_parser("matrix-value", parents=[common], help="value of a matrix game")
    p.add_argument("matrix")
    p.set_defaults(handler=cmd_matrix_value)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    settings = load_settings().with_overrides(
        tol=getattr(args, "tol", None), precision=getattr(args, "precision", None)
    )
    configure_logging(settings)
    try:
        return args.handler(args, settings)
    except SgAlgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:
        log.exception("unexpected failure: %s", exc)
        return 4


if __name__ == "__main__":
    sys.exit(main())
