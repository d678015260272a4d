from fractions import Fraction as Q

import pytest

from sgalg import limit as limit_module
from sgalg.algsolve import solve_discounted
from sgalg.arith import MultiPoly, UniPoly
from sgalg.errors import KernelNotStableError, PolynomialError, UsageError
from sgalg.game import StochasticGame
from sgalg.limit import (
    BetaSchedule,
    drift_allowance,
    limit_polynomial,
    solve_limit,
    stable_kernel,
)

SHORT = BetaSchedule(1, 4)


def z(i, nv=3):
    return MultiPoly.variable(nv, i)


def rps_self_loop():
    stay = [[[1]] * 3] * 3
    return StochasticGame.of([[[1, 0, -1], [-1, 1, 0], [0, -1, 1]]], [stay])


def test_schedule():
    assert SHORT.ks == (1, 2, 3, 4)
    assert SHORT.betas[0] == Q(9, 10)
    assert SHORT.betas[-1] == Q(9999, 10000)
    with pytest.raises(UsageError):
        BetaSchedule(3, 3)
    with pytest.raises(UsageError):
        BetaSchedule(0, 4)


def test_drift_allowance_rounds_up():
    allowed = drift_allowance(Q(99, 100), Q(10), 4)
    assert allowed >= Q(316227, 100000)
    assert allowed < Q(317, 100)


def test_limit_polynomial_examples():
    ell, poly = limit_polynomial((1 - z(0)) * (z(1) - 3))
    assert ell == 1
    assert poly == UniPoly((-3, 1))
    ell, poly = limit_polynomial(5 * z(0) * z(1) + 60 * z(1) + 88 * z(0) - 160)
    assert ell == 0
    assert poly == UniPoly((-72, 65))
    ell, poly = limit_polynomial(((1 - z(0)) ** 3) * z(2), 2)
    assert ell == 3
    assert poly == UniPoly((0, 1))


def test_limit_polynomial_errors():
    with pytest.raises(PolynomialError):
        limit_polynomial(MultiPoly.zero(3))
    with pytest.raises(PolynomialError):
        limit_polynomial(z(0) + z(1) + z(2))


EXAMPLE1_LIMIT = Q(113, 79)


def test_example1_kernel_is_stable(example1, settings):
    trace = stable_kernel(example1, SHORT, settings)
    assert trace.agreement >= 2
    assert trace.selection == trace.points[-1].selection == trace.points[-2].selection
    assert trace.shift == 3
    assert [p.k for p in trace.points] == [1, 2, 3, 4]


def test_example1_limit_value(example1, settings):
    report = solve_limit(example1, settings=settings, schedule=SHORT)
    assert [v.interval.exact for v in report.values] == [EXAMPLE1_LIMIT, EXAMPLE1_LIMIT]
    assert all(v.ell >= 0 for v in report.values)
    assert str(report.values[0].decimal) == "1.4303797468"
    assert report.trace.agreement >= 2
    assert set(report.timings) == {"schedule", "groebner", "roots"}


@pytest.mark.slow
def test_example1_default_schedule(example1, settings):
    report = solve_limit(example1, settings=settings)
    assert report.schedule == BetaSchedule(settings.k0, settings.kmax)
    assert [v.interval.exact for v in report.values] == [EXAMPLE1_LIMIT, EXAMPLE1_LIMIT]
    points = report.trace.points
    assert [p.k for p in points] == [1, 2, 3, 4, 5, 6]
    for s in range(example1.N):
        gaps = [abs(p.estimate.estimate[s] - report.trace.shift - EXAMPLE1_LIMIT) for p in points]
        assert gaps[-1] < gaps[0]
        assert gaps[-1] < Q(1, 10**4)


def test_schedule_is_extended_when_kernel_not_stable(example1, settings, monkeypatch):
    calls = []
    real = limit_module.stable_kernel

    def flaky(g, schedule, settings=None, cache=None):
        calls.append(schedule.kmax)
        if len(calls) == 1:
            raise KernelNotStableError("kernel still moving")
        return real(g, schedule, settings, cache)

    monkeypatch.setattr(limit_module, "stable_kernel", flaky)
    report = solve_limit(example1, settings=settings, schedule=BetaSchedule(1, 3))
    assert calls == [3, 4]
    assert report.schedule == BetaSchedule(1, 4)
    assert report.values[0].interval.exact == EXAMPLE1_LIMIT


def test_schedule_stops_at_cap(example1, settings, monkeypatch):
    calls = []

    def never(g, schedule, settings=None, cache=None):
        calls.append(schedule.kmax)
        raise KernelNotStableError("kernel still moving")

    monkeypatch.setattr(limit_module, "stable_kernel", never)
    with pytest.raises(KernelNotStableError, match="cap 4"):
        solve_limit(example1, settings=settings.with_overrides(kmax_cap=4), schedule=BetaSchedule(1, 3))
    assert calls == [3, 4]


def test_single_state_constant_reward(settings):
    g = StochasticGame.of([[[5]]], [[[[1]]]])
    report = solve_limit(g, settings=settings, schedule=SHORT)
    (value,) = report.values
    assert value.interval.exact == 5
    assert value.ell == 1


def test_rock_paper_scissors_self_loop(settings):
    g = rps_self_loop()
    report = solve_limit(g, settings=settings, schedule=SHORT)
    assert report.values[0].interval.exact == 0
    assert report.values[0].ell == 3
    discounted = solve_discounted(g, Q(1, 2), settings=settings)
    assert discounted.values == (0,)
    assert discounted.states[0].x == (Q(1, 3),) * 3


def test_bad_precision(example1, settings):
    with pytest.raises(UsageError):
        solve_limit(example1, precision=Q(-1), settings=settings, schedule=SHORT)
