from decimal import Decimal
from fractions import Fraction as Q

import pytest

from sgalg.arith import UniPoly
from sgalg.errors import PolynomialError
from sgalg.roots import (
    IsolatingInterval,
    decimal_places,
    interval_eval,
    isolate_real_roots,
    refine,
    to_decimal,
)


def test_isolates_each_root_once():
    roots = [Q(-3), Q(1, 7), Q(2)]
    found = isolate_real_roots(UniPoly.from_roots(roots))
    assert len(found) == 3
    for iv, r in zip(found, roots):
        assert iv.lo < r < iv.hi or iv.exact == r
    assert [iv.lo for iv in found] == sorted(iv.lo for iv in found)


def test_repeated_roots_are_collapsed():
    found = isolate_real_roots(UniPoly.from_roots([1, 1, 1, -4]))
    assert len(found) == 2
    assert found[0].poly.degree == 2


def test_linear_root_is_exact():
    (iv,) = isolate_real_roots(UniPoly((-3, 2)))
    assert iv.exact == Q(3, 2)
    assert iv.midpoint == Q(3, 2)
    assert iv.contains(Q(3, 2))


def test_no_real_roots():
    assert isolate_real_roots(UniPoly((1, 0, 1))) == []
    assert isolate_real_roots(UniPoly((7,))) == []
    with pytest.raises(PolynomialError):
        isolate_real_roots(UniPoly(()))


def test_refine_square_root_of_two():
    p = UniPoly((-2, 0, 1))
    negative, positive = isolate_real_roots(p)
    narrow = refine(positive, Q(1, 10**12))
    assert narrow.width <= Q(1, 10**12)
    assert narrow.lo**2 < 2 < narrow.hi**2
    assert narrow.lo > 0
    assert refine(negative, Q(1, 10**6)).hi < 0
    with pytest.raises(ValueError):
        refine(positive, Q(0))


def test_refine_lands_on_rational_root():
    p = UniPoly.from_roots([Q(1, 2), 5])
    iv = IsolatingInterval(Q(0), Q(1), p)
    narrow = refine(iv, Q(1, 1000))
    assert narrow.exact == Q(1, 2)
    assert narrow.width <= Q(1, 1000)


def test_meets_closed_range():
    iv = IsolatingInterval(Q(1), Q(2), UniPoly((-3, 2)))
    assert iv.meets(Q(2), Q(5)) is False
    assert iv.meets(Q(0), Q(3, 2))
    exact = IsolatingInterval(Q(0), Q(4), UniPoly((-2, 1)), exact=Q(2))
    assert exact.meets(Q(2), Q(3))
    assert not exact.meets(Q(5, 2), Q(3))


def test_interval_eval_encloses_samples():
    p = UniPoly((1, -3, 0, 2))
    lo, hi = Q(-1), Q(3, 2)
    low, high = interval_eval(p, lo, hi)
    for k in range(11):
        x = lo + (hi - lo) * k / 10
        assert low <= p(x) <= high


@pytest.mark.parametrize(
    "precision, places",
    [(Q(1), 0), (Q(3, 100), 2), (Q(1, 100), 2), (Q(1, 10**10), 10), (Q(5, 10**10), 10)],
)
def test_decimal_places(precision, places):
    assert decimal_places(precision) == places


def test_to_decimal_rounds_half_even():
    assert to_decimal(Q(2, 3), 4) == Decimal("0.6667")
    assert to_decimal(Q(-1, 8), 2) == Decimal("-0.12")
    assert str(to_decimal(Q(232, 125), 9)) == "1.856000000"
    assert str(to_decimal(Q(123456789, 1), 2)) == "123456789.00"
