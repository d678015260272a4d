from fractions import Fraction as Q

import pytest

from sgalg.arith import (
    MultiPoly,
    TermOrder,
    UniPoly,
    cauchy_bound,
    content_power,
    count_real_roots,
    format_rational,
    parse_poly,
    parse_rational,
    poly_arith,
    squarefree_part,
    sturm_sequence,
    substitute,
    to_univariate,
)
from sgalg.errors import PolynomialError


def z(i, nv=3):
    return MultiPoly.variable(nv, i)


def test_parse_and_format_rationals():
    assert parse_rational("3/10") == Q(3, 10)
    assert parse_rational("-2") == -2
    assert parse_rational(" +7/14 ") == Q(1, 2)
    assert format_rational(Q(-6, 4)) == "-3/2"
    assert format_rational(5) == "5"


@pytest.mark.parametrize("text", ["0.5", "1e-3", "1/0", "a", "1//2", ""])
def test_parse_rational_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_multipoly_ring_operations():
    p = (z(1) + 1) * (z(1) - 1)
    assert p == z(1) ** 2 - 1
    assert (p - p).is_zero()
    assert (2 * z(2) + z(2)) == MultiPoly.term(3, (0, 0, 1), 3)
    assert p.degree() == 2 and p.degree(2) == 0
    assert p.variables() == frozenset({1})


def test_substitute_and_evaluate():
    p = z(0) * z(1) ** 2 - 3 * z(2) + Q(1, 2)
    assert p.evaluate([2, 3, 1]) == Q(31, 2)
    q = p.substitute(0, Q(1, 2))
    assert q.variables() == frozenset({1, 2})
    assert q.evaluate([0, 3, 1]) == Q(2)


def test_term_orders():
    order = TermOrder.lex([0, 1, 2])
    assert order.compare((0, 0, 1), (5, 5, 0)) == 1
    assert order.compare((1, 0, 0), (0, 1, 0)) == -1
    elim = TermOrder.elimination(4, 2)
    assert elim.ascending == (0, 2, 1, 3)
    assert elim.describe() == "z0 < z2 < z1 < z3"
    with pytest.raises(PolynomialError):
        TermOrder.elimination(3, 0)
    with pytest.raises(PolynomialError):
        TermOrder((0, 0, 1))


def test_leading_terms_and_normalisation():
    order = TermOrder.lex([0, 1, 2])
    p = Q(2, 3) * z(0) ** 3 - Q(4, 9) * z(1)
    assert p.leading_monomial(order) == (0, 1, 0)
    assert p.monic(order).leading_coefficient(order) == 1
    prim = p.primitive(order)
    assert prim == 2 * z(1) - 3 * z(0) ** 3
    assert prim.is_proportional(p)


def test_divide_exact():
    a = z(0) + z(1)
    b = z(1) - 2 * z(2)
    assert (a * b).divide_exact(b) == a
    with pytest.raises(PolynomialError):
        (a * b + 1).divide_exact(b)


def test_text_reads_back():
    order = TermOrder.lex([0, 1, 2])
    p = Q(-5, 2) * z(0) ** 2 * z(1) + 7 * z(2) - 1
    text = p.to_text(order)
    assert text == "7*z2 - 5/2*z0^2*z1 - 1"
    assert parse_poly(text, 3) == p


def test_content_power_of_one_minus_z0():
    one_minus = 1 - z(0)
    core = z(1) * z(0) + 3
    ell, rest = content_power(one_minus**2 * core, one_minus)
    assert ell == 2
    assert rest == core
    ell, rest = content_power(core, 2 * one_minus)
    assert ell == 0 and rest == core
    with pytest.raises(PolynomialError):
        content_power(core, z(0) + 1)


def test_to_univariate():
    p = 3 * z(2) ** 2 - z(2) + 5
    assert to_univariate(p, 2).coeffs == (5, -1, 3)
    with pytest.raises(PolynomialError):
        to_univariate(p + z(0), 2)


def test_unipoly_division_and_squarefree():
    p = UniPoly.from_roots([1, 1, -2])
    q, r = p.divmod(UniPoly.from_roots([1]))
    assert r.is_zero()
    assert q == UniPoly.from_roots([1, -2])
    assert squarefree_part(p) == UniPoly((-2, 1, 1))
    assert UniPoly((Q(1, 2), Q(-3, 4))).primitive() == UniPoly((-2, 3))


def test_sturm_chain_matches_known_sequence():
    f = UniPoly((-5, 3, -2, 1))
    assert sturm_sequence(f) == [
        f,
        UniPoly((3, -4, 3)),
        UniPoly((Q(13, 3), Q(-10, 9))),
        UniPoly((Q(-3303, 100),)),
    ]


def test_count_real_roots_half_open():
    chain = sturm_sequence(UniPoly.from_roots([-1, Q(1, 2), 3]))
    assert count_real_roots(chain, None, None) == 3
    assert count_real_roots(chain, 0, 3) == 2
    assert count_real_roots(chain, Q(1, 2), 2) == 0
    assert count_real_roots(chain, -5, -1) == 1


def test_cauchy_bound_encloses_roots():
    p = UniPoly.from_roots([-7, Q(1, 3), 12])
    bound = cauchy_bound(p)
    assert all(abs(r) < bound for r in (-7, Q(1, 3), 12))


def test_poly_arith_and_substitute_commute():
    a = 2 * z(0) * z(1) - z(2) + Q(1, 3)
    b = z(1) ** 2 + 5 * z(0)
    for op in ("add", "sub", "mul"):
        whole = substitute(poly_arith(a, b, op), 1, Q(-2, 7))
        parts = poly_arith(substitute(a, 1, Q(-2, 7)), substitute(b, 1, Q(-2, 7)), op)
        assert whole == parts
        assert whole.degree(1) == 0
    with pytest.raises(PolynomialError):
        poly_arith(a, MultiPoly.variable(2, 0), "add")
    with pytest.raises(PolynomialError):
        poly_arith(a, b, "div")
