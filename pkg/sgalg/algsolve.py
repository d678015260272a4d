"""
Discounted solve: value iteration, kernel selection, elimination, root
selection and refinement, strategy recovery and a residual check.

Value iteration and kernel inference run on the reward-shifted game (all
auxiliary values nonzero). The polynomial system and its certificates are
built from the original rewards with the same kernel selection; kernels are
unchanged by a constant shift of the rewards.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from itertools import chain
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .arith import UniPoly, count_real_roots, sturm_sequence, to_univariate
from .config import Settings, load_settings
from .errors import (
    AmbiguityError,
    CertificateError,
    DegenerateKernelError,
    KernelAmbiguityError,
    KernelSearchExhaustedError,
    NoBivariateElementError,
    NoRootNearEstimateError,
    RootAmbiguityError,
    SingularKernelError,
    UsageError,
)
from .game import (
    Mode,
    MixedStrategy,
    StationaryStrategyPair,
    StochasticGame,
    check_mode,
    classify,
    shift_delta,
    shift_rewards,
)
from .groebner import BivariateCertificate, GroebnerBasis, certificates
from .matrix_game import kernel_strategies
from .polysys import CoupledSystem, KernelSelection, build_system, candidate_selections, infer_kernel
from .roots import (
    IsolatingInterval,
    decimal_places,
    interval_eval,
    isolate_real_roots,
    refine,
    to_decimal,
)
from .shapley import ValueEstimate, as_beta, aux_game, shapley_operator, value_iteration
from .workers import ordered_map

log = logging.getLogger("sgalg.algsolve")

RESIDUAL_FACTOR = 10


@dataclass(frozen=True)
class AlgebraicValue:
    state: int
    poly: UniPoly  # square-free, integer coefficients
    interval: IsolatingInterval
    decimal: Decimal
    mode: str

    @property
    def approx(self) -> Fraction:
        return self.interval.midpoint

    @property
    def exact(self) -> Optional[Fraction]:
        return self.interval.exact


@dataclass(frozen=True)
class StateSolution:
    certificate: BivariateCertificate
    value: AlgebraicValue
    x: MixedStrategy
    y: MixedStrategy


@dataclass(frozen=True)
class SolveReport:
    beta: Fraction
    mode: str
    precision: Fraction
    shift: Fraction
    selection: KernelSelection
    system: CoupledSystem
    bases: Tuple[GroebnerBasis, ...]
    states: Tuple[StateSolution, ...]
    residual: Fraction
    estimate: ValueEstimate
    attempts: int
    classes: Tuple[str, ...] = ()
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def values(self) -> Tuple[Fraction, ...]:
        return tuple(st.value.approx for st in self.states)

    @property
    def strategies(self) -> StationaryStrategyPair:
        return StationaryStrategyPair(
            tuple(st.x for st in self.states), tuple(st.y for st in self.states)
        )


class _Rejected(Exception):
    """A kernel selection produced values that fail verification."""


def select_value_root(
    roots: Sequence[IsolatingInterval], estimate: Fraction, bound: Fraction
) -> IsolatingInterval:
    """The unique root within bound of the estimate."""
    if len(roots) == 1:
        return roots[0]
    lo, hi = estimate - bound, estimate + bound
    floor = max(bound / 8, Fraction(1, 10**40))
    near = [r for r in roots if r.meets(lo, hi)]
    while near and any(r.exact is None and r.width > floor for r in near):
        near = [r if r.exact is not None else refine(r, r.width / 2) for r in near]
        near = [r for r in near if r.meets(lo, hi)]
    if not near:
        raise NoRootNearEstimateError(
            f"no root within {float(bound):.3g} of the estimate {float(estimate):.12g}"
        )
    if len(near) > 1:
        raise RootAmbiguityError(
            f"{len(near)} roots within {float(bound):.3g} of the estimate {float(estimate):.12g}"
        )
    return near[0]


def report_interval(iv: IsolatingInterval, decimal: Decimal, slack: Fraction) -> IsolatingInterval:
    """Widen iv so the printed decimal lies strictly inside it, keeping it isolating."""
    d = Fraction(decimal)
    if iv.lo < d < iv.hi:
        return iv
    lo, hi = min(iv.lo, d - slack), max(iv.hi, d + slack)
    p = iv.poly
    while p(lo) == 0:
        lo -= slack
    while p(hi) == 0:
        hi += slack
    if count_real_roots(sturm_sequence(p), lo, hi) != 1:
        raise RootAmbiguityError("reported decimal is not separated from a neighbouring root")
    return IsolatingInterval(lo, hi, p, iv.exact)


def _value_for_state(
    cert: BivariateCertificate,
    beta: Fraction,
    target: Fraction,
    bound: Fraction,
    precision: Fraction,
    mode: str,
) -> AlgebraicValue:
    s = cert.state
    at_beta = to_univariate(cert.poly.substitute(0, beta), cert.var)
    if at_beta.is_zero():
        raise NoBivariateElementError(f"state {s + 1}: certificate vanishes at beta = {beta}")
    full_degree = cert.poly.degree(cert.var)
    if at_beta.degree < full_degree:
        log.warning(
            "state %d: certificate drops from degree %d to %d at beta = %s",
            s + 1,
            full_degree,
            at_beta.degree,
            beta,
        )
    roots = isolate_real_roots(at_beta)
    chosen = select_value_root(roots, target, bound)
    places = decimal_places(precision / 10)
    refined = refine(chosen, precision / 2)
    decimal = to_decimal(refined.midpoint, places)
    interval = report_interval(refined, decimal, precision / 20)
    low, high = interval_eval(interval.poly, interval.lo, interval.hi)
    if not low <= 0 <= high:
        raise CertificateError(f"state {s + 1}: certificate does not vanish on the reported interval")
    return AlgebraicValue(s, interval.poly.primitive(), interval, decimal, mode)


def _strategies(
    shifted: StochasticGame,
    values: Sequence[Fraction],
    selection: KernelSelection,
    beta: Fraction,
    mode: str,
) -> List[Tuple[MixedStrategy, MixedStrategy]]:
    out = []
    for s, (rows, cols) in enumerate(selection.supports):
        A = aux_game(shifted, s, values, beta, mode)
        try:
            x0, y0 = kernel_strategies(A.submatrix(rows, cols))
        except (SingularKernelError, DegenerateKernelError) as exc:
            raise _Rejected(f"state {s + 1}: {exc}") from None
        if min(x0) < 0 or min(y0) < 0:
            raise _Rejected(f"state {s + 1}: kernel strategies leave the simplex")
        x = [Fraction(0)] * A.m
        y = [Fraction(0)] * A.n
        for i, p in zip(rows, x0):
            x[i] = p
        for j, q in zip(cols, y0):
            y[j] = q
        out.append((tuple(x), tuple(y)))
    return out


def _solve_with(
    g: StochasticGame,
    shifted: StochasticGame,
    delta: Fraction,
    selection: KernelSelection,
    estimate: ValueEstimate,
    beta: Fraction,
    mode: str,
    precision: Fraction,
    workers: Optional[int],
    timings: Dict[str, float],
) -> Tuple[CoupledSystem, List[GroebnerBasis], List[StateSolution], Fraction]:
    t0 = time.perf_counter()
    system = build_system(g, selection, mode, workers)
    pairs = certificates(system, workers)
    t1 = time.perf_counter()
    timings["groebner"] = timings.get("groebner", 0.0) + t1 - t0

    def one(s: int) -> AlgebraicValue:
        target = estimate.estimate[s] - delta
        return _value_for_state(pairs[s][1], beta, target, estimate.error_bound, precision, mode)

    values = ordered_map(one, range(g.N), workers)
    approx = tuple(v.approx for v in values)
    timings["roots"] = timings.get("roots", 0.0) + time.perf_counter() - t1

    residual = max(abs(a - b) for a, b in zip(shapley_operator(g, approx, beta, mode, workers), approx))
    if residual > RESIDUAL_FACTOR * precision:
        raise _Rejected(f"fixed-point residual {float(residual):.3g} exceeds {RESIDUAL_FACTOR}x precision")
    strategies = _strategies(shifted, [v + delta for v in approx], selection, beta, mode)
    states = [
        StateSolution(pairs[s][1], values[s], *strategies[s]) for s in range(g.N)
    ]
    return system, [basis for basis, _ in pairs], states, residual


def solve_discounted(
    g: StochasticGame,
    beta,
    mode: str = Mode.NORMALIZED,
    precision: Optional[Fraction] = None,
    settings: Optional[Settings] = None,
    selection: Optional[KernelSelection] = None,
) -> SolveReport:
    """
    Exact-certificate solve of the discounted game at beta.

    Kernel failures (no bivariate element, no root near the estimate, failed
    residual) move on to the next candidate selection; ambiguity tightens the
    value-iteration tolerance by 1000x, up to settings.retries times.
    """
    settings = settings or load_settings()
    beta = as_beta(beta)
    check_mode(mode)
    precision = Fraction(precision) if precision is not None else settings.precision
    if precision <= 0:
        raise UsageError("precision must be positive")
    workers = settings.workers
    timings: Dict[str, float] = {}

    shifted, shift = shift_rewards(g)
    delta = shift_delta(shift.c, mode, beta)
    tol = settings.tol
    attempts = 0
    last_error: Optional[Exception] = None

    for retry in range(settings.retries + 1):
        t0 = time.perf_counter()
        estimate = value_iteration(shifted, beta, mode, tol, workers=workers)
        timings["iterate"] = timings.get("iterate", 0.0) + time.perf_counter() - t0

        if selection is not None:
            candidates: Iterable[KernelSelection] = [selection.validate(g)]
        else:
            try:
                first = infer_kernel(shifted, beta, estimate, strict=retry < settings.retries, workers=workers)
            except KernelAmbiguityError as exc:
                log.warning("%s; tightening tolerance to %.3g", exc, float(tol / 1000))
                last_error = exc
                tol /= 1000
                continue
            fallback = (
                c
                for c in candidate_selections(shifted, beta, estimate, settings.kernel_candidates, workers)
                if c != first
            )
            candidates = chain([first], fallback)

        ambiguous = None
        for kappa in candidates:
            attempts += 1
            try:
                system, bases, states, residual = _solve_with(
                    g, shifted, delta, kappa, estimate, beta, mode, precision, workers, timings
                )
            except (CertificateError, NoRootNearEstimateError, _Rejected) as exc:
                log.warning("kernel selection rejected (%s): %s", "; ".join(kappa.describe()), exc)
                last_error = exc
                continue
            except AmbiguityError as exc:
                ambiguous = exc
                break
            log.info("solved at beta=%s after %d kernel selection(s)", beta, attempts)
            return SolveReport(
                beta=beta,
                mode=mode,
                precision=precision,
                shift=shift.c,
                selection=kappa,
                system=system,
                bases=tuple(bases),
                states=tuple(states),
                residual=residual,
                estimate=estimate,
                attempts=attempts,
                classes=classify(g),
                timings=timings,
            )
        if ambiguous is None:
            raise KernelSearchExhaustedError(
                f"no kernel selection yields a verified solution after {attempts} attempt(s)"
                + (f"; last failure: {last_error}" if last_error else "")
            )
        log.warning("%s; tightening tolerance to %.3g", ambiguous, float(tol / 1000))
        last_error = ambiguous
        tol /= 1000

    raise last_error
