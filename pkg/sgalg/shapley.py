"""
Shapley's auxiliary games, the operator T_beta and value iteration with
certified error bounds.
"""

from __future__ import annotations

import logging
from concurrent.futures import Executor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

from .arith import parse_rational
from .config import load_settings
from .errors import GameValidationError, ToleranceNotReachedError, UsageError
from .game import MatrixGame, Mode, StochasticGame, check_mode
from .matrix_game import matrix_value
from .workers import ordered_map, worker_pool

log = logging.getLogger("sgalg.shapley")

Vector = Tuple[Fraction, ...]


class Bounds:
    SUP = "sup"
    SPAN = "span"
    ALL = (SUP, SPAN)


@dataclass(frozen=True)
class DiscountFactor:
    beta: Fraction

    def __post_init__(self) -> None:
        beta = Fraction(self.beta)
        if not 0 < beta < 1:
            raise UsageError(f"discount factor must lie in (0, 1), got {beta}")
        object.__setattr__(self, "beta", beta)

    @classmethod
    def parse(cls, text: str) -> "DiscountFactor":
        try:
            return cls(parse_rational(text))
        except ValueError:
            raise UsageError(f"bad discount factor {text!r}; expected num/den") from None


BetaLike = Union[DiscountFactor, Fraction, int, str]


def as_beta(beta: BetaLike) -> Fraction:
    if isinstance(beta, DiscountFactor):
        return beta.beta
    if isinstance(beta, str):
        return DiscountFactor.parse(beta).beta
    return DiscountFactor(Fraction(beta)).beta


@dataclass(frozen=True)
class ValueEstimate:
    """
    estimate is T(u) for the last iterate u; residual = ||T(u) - u||_inf.
    error_bound bounds ||estimate - v(beta)||_inf.
    """

    estimate: Vector
    residual: Fraction
    error_bound: Fraction
    mode: str
    beta: Fraction
    iterations: int
    bounds: str = Bounds.SUP

    def interval(self, s: int) -> Tuple[Fraction, Fraction]:
        return self.estimate[s] - self.error_bound, self.estimate[s] + self.error_bound


def aux_game(
    g: StochasticGame, s: int, u: Sequence[Fraction], beta: BetaLike, mode: str = Mode.NORMALIZED
) -> MatrixGame:
    beta = as_beta(beta)
    check_mode(mode)
    if len(u) != g.N:
        raise GameValidationError(f"vector has {len(u)} entries, expected {g.N}")
    weight = 1 - beta if mode == Mode.NORMALIZED else Fraction(1)
    data = g.states[s]
    rows = []
    for a, reward_row in enumerate(data.rewards.entries):
        row = []
        for b, r in enumerate(reward_row):
            future = sum((p * ut for p, ut in zip(data.transitions[a][b], u) if p), Fraction(0))
            row.append(weight * r + beta * future)
        rows.append(tuple(row))
    return MatrixGame(tuple(rows))


def shapley_operator(
    g: StochasticGame,
    u: Sequence[Fraction],
    beta: BetaLike,
    mode: str = Mode.NORMALIZED,
    workers: Optional[int] = None,
    pool: Optional[Executor] = None,
) -> Vector:
    beta = as_beta(beta)
    u = tuple(Fraction(x) for x in u)
    return tuple(
        ordered_map(lambda s: matrix_value(aux_game(g, s, u, beta, mode)), range(g.N), workers, pool)
    )


def round_to_grid(u: Sequence[Fraction], bits: int) -> Vector:
    scale = 1 << bits
    return tuple(Fraction(round(x * scale), scale) for x in u)


def value_iteration(
    g: StochasticGame,
    beta: BetaLike,
    mode: str = Mode.NORMALIZED,
    tol: Optional[Fraction] = None,
    bounds: str = Bounds.SUP,
    start: Optional[Sequence[Fraction]] = None,
    max_iter: Optional[int] = None,
    grid_bits: Optional[int] = None,
    workers: Optional[int] = None,
) -> ValueEstimate:
    """
    Iterate u <- T(u) from u = 0 until the certified bound drops to tol.

    sup:  v(beta) within beta/(1-beta) * ||Tu - u|| of Tu.
    span: with d = Tu - u, v(beta) lies in [Tu + c*min d, Tu + c*max d],
          c = beta/(1-beta); the estimate is the midpoint.
    """
    settings = load_settings()
    beta = as_beta(beta)
    check_mode(mode)
    if bounds not in Bounds.ALL:
        raise UsageError(f"unknown bounds {bounds!r}")
    tol = settings.tol if tol is None else Fraction(tol)
    if tol <= 0:
        raise UsageError("tolerance must be positive")
    max_iter = max_iter or settings.max_iter
    grid_bits = grid_bits or settings.grid_bits
    factor = beta / (1 - beta)
    workers = settings.workers if workers is None else workers

    u = tuple(Fraction(x) for x in start) if start is not None else (Fraction(0),) * g.N
    bound = None
    with worker_pool(workers, g.N) as pool:
        for iteration in range(1, max_iter + 1):
            Tu = shapley_operator(g, u, beta, mode, workers, pool)
            d = [a - b for a, b in zip(Tu, u)]
            residual = max(abs(x) for x in d)
            if bounds == Bounds.SUP:
                estimate = Tu
                bound = factor * residual
            else:
                lo, hi = min(d), max(d)
                shift = factor * (lo + hi) / 2
                estimate = tuple(x + shift for x in Tu)
                bound = factor * (hi - lo) / 2
            if iteration % 100 == 0:
                log.debug("iteration %d: residual %s, bound %s", iteration, float(residual), float(bound))
            if bound <= tol:
                log.info(
                    "value iteration converged in %d iterations (beta=%s, bound %.3g)",
                    iteration,
                    beta,
                    float(bound),
                )
                return ValueEstimate(estimate, residual, bound, mode, beta, iteration, bounds)
            u = round_to_grid(Tu, grid_bits)

    raise ToleranceNotReachedError(
        f"tolerance {float(tol):.3g} not reached after {max_iter} iterations "
        f"(bound {float(bound):.3g} at beta={beta})"
    )
