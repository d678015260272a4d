"""
Limiting-average values.

Along beta_k = 1 - 10^-k the kernel selection at the discounted values
eventually repeats. With that selection the normalized certificate
g_s(z0, z_s) is divided by its largest power of (1 - z0) and evaluated at
z0 = 1; the limiting value of state s is the root of the result closest to
the discounted values, within the value-iteration bound plus a drift
allowance C * (1 - beta)^(1/M).
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .algsolve import report_interval, select_value_root
from .arith import MultiPoly, UniPoly, content_power, to_univariate
from .config import Settings, load_settings
from .errors import (
    AmbiguityError,
    CertificateError,
    DriftEnvelopeError,
    KernelNotStableError,
    PolynomialError,
    UsageError,
)
from .game import Mode, StochasticGame, shift_rewards
from .groebner import BivariateCertificate, certificates
from .polysys import CoupledSystem, KernelSelection, build_system, infer_kernel
from .roots import IsolatingInterval, decimal_places, isolate_real_roots, refine, to_decimal
from .shapley import Bounds, ValueEstimate, value_iteration
from .workers import ordered_map

log = logging.getLogger("sgalg.limit")


@dataclass(frozen=True)
class BetaSchedule:
    k0: int = 1
    kmax: int = 6

    def __post_init__(self) -> None:
        if self.k0 < 1 or self.kmax <= self.k0:
            raise UsageError(f"schedule needs 1 <= k0 < kmax, got k0={self.k0}, kmax={self.kmax}")

    @property
    def ks(self) -> Tuple[int, ...]:
        return tuple(range(self.k0, self.kmax + 1))

    @property
    def betas(self) -> Tuple[Fraction, ...]:
        return tuple(1 - Fraction(1, 10**k) for k in self.ks)


@dataclass(frozen=True)
class SchedulePoint:
    k: int
    beta: Fraction
    estimate: ValueEstimate  # of the reward-shifted game, normalized
    selection: KernelSelection


@dataclass(frozen=True)
class KernelTrace:
    selection: KernelSelection
    agreement: int  # consecutive largest-k points using selection
    points: Tuple[SchedulePoint, ...]
    shift: Fraction


@dataclass(frozen=True)
class LimitValue:
    state: int
    poly: UniPoly
    interval: IsolatingInterval
    decimal: Decimal
    ell: int

    @property
    def approx(self) -> Fraction:
        return self.interval.midpoint


@dataclass(frozen=True)
class LimitReport:
    values: Tuple[LimitValue, ...]
    certificates: Tuple[BivariateCertificate, ...]
    system: CoupledSystem
    trace: KernelTrace
    schedule: BetaSchedule
    drift_c: Fraction
    drift_m: int
    precision: Fraction
    timings: Dict[str, float] = field(default_factory=dict)


def drift_allowance(beta: Fraction, c: Fraction, m: int) -> Fraction:
    """C * (1 - beta)^(1/M), rounded up to a rational."""
    return Fraction(float(c) * float(1 - beta) ** (1 / m)) * Fraction(1001, 1000)


def _schedule_point(shifted: StochasticGame, k: int, settings: Settings) -> SchedulePoint:
    beta = 1 - Fraction(1, 10**k)
    estimate = value_iteration(
        shifted, beta, Mode.NORMALIZED, settings.tol, bounds=Bounds.SPAN, workers=1
    )
    selection = infer_kernel(shifted, beta, estimate, strict=False, workers=1)
    return SchedulePoint(k, beta, estimate, selection)


def stable_kernel(
    g: StochasticGame,
    schedule: BetaSchedule,
    settings: Optional[Settings] = None,
    cache: Optional[Dict[int, SchedulePoint]] = None,
) -> KernelTrace:
    """Kernel selection shared by the largest schedule points (at least two of them)."""
    settings = settings or load_settings()
    shifted, shift = shift_rewards(g)
    cache = {} if cache is None else cache
    missing = [k for k in schedule.ks if k not in cache]
    for point in ordered_map(lambda k: _schedule_point(shifted, k, settings), missing, settings.workers):
        cache[point.k] = point
    points = tuple(cache[k] for k in schedule.ks)

    last = points[-1].selection
    agreement = 0
    for point in reversed(points):
        if point.selection != last:
            break
        agreement += 1
    for point in points:
        log.debug("k=%d: %s", point.k, "; ".join(point.selection.describe()))
    if agreement < 2:
        raise KernelNotStableError(
            f"kernel did not stabilize on schedule k={schedule.k0}..{schedule.kmax}; "
            "extend kmax"
        )
    log.info("kernel stable over the last %d schedule points", agreement)
    return KernelTrace(last, agreement, points, shift.c)


def limit_polynomial(g_s: MultiPoly, var: Optional[int] = None) -> Tuple[int, UniPoly]:
    """(l, g_s / (1 - z0)^l at z0 = 1) as a polynomial in z_var."""
    if g_s.is_zero():
        raise PolynomialError("limit polynomial of the zero polynomial")
    if var is None:
        others = sorted(g_s.variables() - {0})
        if len(others) != 1:
            raise PolynomialError("expected a polynomial in z0 and one other variable")
        var = others[0]
    one_minus_z0 = 1 - MultiPoly.variable(g_s.nvars, 0)
    ell, reduced = content_power(g_s, one_minus_z0)
    return ell, to_univariate(reduced.substitute(0, 1), var)


def _limit_value(
    cert: BivariateCertificate,
    trace: KernelTrace,
    settings: Settings,
    precision: Fraction,
) -> LimitValue:
    s = cert.state
    ell, poly = limit_polynomial(cert.poly, cert.var)
    if poly.is_zero() or poly.degree < 1:
        raise CertificateError(f"state {s + 1}: limit polynomial has no roots")
    top = trace.points[-1]
    target = top.estimate.estimate[s] - trace.shift
    window = top.estimate.error_bound + drift_allowance(top.beta, settings.drift_c, settings.drift_m)
    chosen = select_value_root(isolate_real_roots(poly), target, window)
    refined = refine(chosen, precision / 2)
    decimal = to_decimal(refined.midpoint, decimal_places(precision / 10))
    interval = report_interval(refined, decimal, precision / 20)
    value = interval.midpoint
    for point in trace.points:
        allowed = point.estimate.error_bound + drift_allowance(
            point.beta, settings.drift_c, settings.drift_m
        )
        gap = abs(value - (point.estimate.estimate[s] - trace.shift))
        if gap > allowed:
            raise DriftEnvelopeError(
                f"state {s + 1}: limit {float(value):.9g} is {float(gap):.3g} from the "
                f"beta={float(point.beta)} estimate, allowance {float(allowed):.3g}"
            )
    log.info("state %d: limit value %s (l=%d)", s + 1, decimal, ell)
    return LimitValue(s, interval.poly.primitive(), interval, decimal, ell)


def solve_limit(
    g: StochasticGame,
    precision: Optional[Fraction] = None,
    settings: Optional[Settings] = None,
    schedule: Optional[BetaSchedule] = None,
) -> LimitReport:
    """
    Limiting-average values of every state. Ambiguity or a failed
    certificate extends the schedule by one point, up to settings.kmax_cap.
    """
    settings = settings or load_settings()
    precision = Fraction(precision) if precision is not None else settings.precision
    if precision <= 0:
        raise UsageError("precision must be positive")
    schedule = schedule or BetaSchedule(settings.k0, settings.kmax)
    cache: Dict[int, SchedulePoint] = {}
    timings: Dict[str, float] = {}

    while True:
        try:
            t0 = time.perf_counter()
            trace = stable_kernel(g, schedule, settings, cache)
            t1 = time.perf_counter()
            system = build_system(g, trace.selection, Mode.NORMALIZED, settings.workers)
            certs = [cert for _, cert in certificates(system, settings.workers)]
            t2 = time.perf_counter()
            values: List[LimitValue] = [
                _limit_value(cert, trace, settings, precision) for cert in certs
            ]
            timings.update(schedule=t1 - t0, groebner=t2 - t1, roots=time.perf_counter() - t2)
            return LimitReport(
                values=tuple(values),
                certificates=tuple(certs),
                system=system,
                trace=trace,
                schedule=schedule,
                drift_c=settings.drift_c,
                drift_m=settings.drift_m,
                precision=precision,
                timings=timings,
            )
        except (AmbiguityError, CertificateError) as exc:
            if schedule.kmax >= settings.kmax_cap:
                raise type(exc)(
                    f"{exc} (schedule k={schedule.k0}..{schedule.kmax}, cap {settings.kmax_cap})"
                ) from exc
            log.warning("%s; extending schedule to kmax=%d", exc, schedule.kmax + 1)
            schedule = BetaSchedule(schedule.k0, schedule.kmax + 1)
