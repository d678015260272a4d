"""
Real roots of univariate rational polynomials: Sturm isolation, bisection
refinement, interval evaluation and decimal output.

An IsolatingInterval holds exactly one root of its square-free polynomial in
(lo, hi); neither endpoint is a root. When the root is known to be rational
it is carried in ``exact``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from typing import List, Optional, Tuple

from .arith import (
    Scalar,
    UniPoly,
    cauchy_bound,
    count_real_roots,
    squarefree_part,
    sturm_sequence,
)
from .errors import PolynomialError

log = logging.getLogger("sgalg.roots")


@dataclass(frozen=True)
class IsolatingInterval:
    lo: Fraction
    hi: Fraction
    poly: UniPoly
    exact: Optional[Fraction] = None

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        if self.exact is not None:
            return self.exact
        return (self.lo + self.hi) / 2

    def contains(self, x: Scalar) -> bool:
        return self.lo < x < self.hi

    def meets(self, lo: Fraction, hi: Fraction) -> bool:
        """The interval intersects the closed range [lo, hi]."""
        if self.exact is not None:
            return lo <= self.exact <= hi
        return self.lo < hi and lo < self.hi


def _nudge(p: UniPoly, point: Fraction, lo: Fraction, hi: Fraction) -> Fraction:
    """A non-root near point, strictly inside (lo, hi)."""
    step = (hi - lo) / 4
    candidate = point
    while p(candidate) == 0:
        candidate = point + step
        step /= 2
    return candidate


def isolate_real_roots(p: UniPoly) -> List[IsolatingInterval]:
    """One interval per distinct real root, ascending."""
    if p.is_zero():
        raise PolynomialError("cannot isolate roots of the zero polynomial")
    q = squarefree_part(p)
    if q.degree <= 0:
        return []
    if q.degree == 1:
        r = -q.coeffs[0] / q.coeffs[1]
        return [IsolatingInterval(r - 1, r + 1, q, exact=r)]

    chain = sturm_sequence(q)
    bound = cauchy_bound(q)
    found: List[IsolatingInterval] = []
    stack: List[Tuple[Fraction, Fraction, int]] = [(-bound, bound, count_real_roots(chain, -bound, bound))]
    while stack:
        lo, hi, count = stack.pop()
        if count == 0:
            continue
        if count == 1:
            found.append(IsolatingInterval(lo, hi, q))
            continue
        mid = _nudge(q, (lo + hi) / 2, lo, hi)
        left = count_real_roots(chain, lo, mid)
        stack.append((mid, hi, count - left))
        stack.append((lo, mid, left))
    found.sort(key=lambda iv: iv.lo)
    log.debug("isolated %d real roots of a degree-%d polynomial", len(found), q.degree)
    return found


def refine(interval: IsolatingInterval, width: Fraction) -> IsolatingInterval:
    """Bisect until hi - lo <= width, keeping the same root."""
    width = Fraction(width)
    if width <= 0:
        raise ValueError("refinement width must be positive")
    if interval.width <= width:
        return interval
    p = interval.poly
    if interval.exact is not None:
        r = interval.exact
        return replace(interval, lo=r - width / 2, hi=r + width / 2)
    lo, hi = interval.lo, interval.hi
    sign_lo = p.sign_at(lo)
    while hi - lo > width:
        mid = (lo + hi) / 2
        s = p.sign_at(mid)
        if s == 0:
            return IsolatingInterval(max(lo, mid - width / 2), min(hi, mid + width / 2), p, exact=mid)
        if s == sign_lo:
            lo = mid
        else:
            hi = mid
    return IsolatingInterval(lo, hi, p)


def interval_eval(p: UniPoly, lo: Fraction, hi: Fraction) -> Tuple[Fraction, Fraction]:
    """An enclosure of p over [lo, hi] by interval Horner evaluation."""
    acc_lo = acc_hi = Fraction(0)
    for c in reversed(p.coeffs):
        products = (acc_lo * lo, acc_lo * hi, acc_hi * lo, acc_hi * hi)
        acc_lo, acc_hi = min(products) + c, max(products) + c
    return acc_lo, acc_hi


def decimal_places(precision: Fraction) -> int:
    """Smallest number of decimal places d with 10^-d <= precision."""
    precision = Fraction(precision)
    if precision <= 0:
        raise ValueError("precision must be positive")
    places = 0
    while Fraction(1, 10**places) > precision:
        places += 1
    return places


def to_decimal(x: Fraction, places: int) -> Decimal:
    x = Fraction(x)
    digits = len(str(abs(x.numerator) // x.denominator)) + places + 5
    with localcontext() as ctx:
        ctx.prec = digits
        value = Decimal(x.numerator) / Decimal(x.denominator)
        return value.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN)
