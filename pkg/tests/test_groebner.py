import random
from fractions import Fraction as Q

import pytest
import sympy

from sgalg.arith import MultiPoly, TermOrder
from sgalg.errors import InconsistentSystemError, NoBivariateElementError
from sgalg.game import Mode
from sgalg.groebner import (
    GroebnerBasis,
    buchberger,
    certificates,
    extract_bivariate,
    reduce,
    spoly,
)
from sgalg.polysys import KernelSelection, build_system

FULL = ((0, 1, 2), (0, 1, 2))


def z(i, nv=3):
    return MultiPoly.variable(nv, i)


def to_sympy(p: MultiPoly, gens):
    return sum(
        (sympy.Rational(c.numerator, c.denominator) * sympy.prod([g**e for g, e in zip(gens, m)])
         for m, c in p),
        sympy.Integer(0),
    )


def sympy_basis(gens, order: TermOrder):
    symbols = sympy.symbols(f"z0:{order.nvars}")
    # sympy's lex compares the first generator first
    ranked = [symbols[i] for i in order.priority]
    G = sympy.groebner([to_sympy(f, symbols) for f in gens], *ranked, order="lex", domain="QQ")
    out = []
    for poly in G.polys:
        terms = {}
        for m, c in poly.terms():
            full = [0] * order.nvars
            for var, e in zip(order.priority, m):
                full[var] = e
            terms[tuple(full)] = Q(int(c.p), int(c.q))
        out.append(MultiPoly(order.nvars, terms))
    return out


def primitive_set(polys, order):
    return sorted(p.primitive(order).to_text(order) for p in polys)


def test_circle_and_line():
    y, x = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    order = TermOrder.lex([0, 1])
    basis = buchberger([x**2 + y**2 - 1, x - y], order)
    assert basis.generators == (y**2 - Q(1, 2), x - y)
    assert basis.is_groebner()
    assert basis.contains(x**2 - Q(1, 2))
    assert not basis.contains(x - 1)


def test_reduce_and_spoly():
    order = TermOrder.lex([0, 1, 2])
    f = z(2) * z(1) - 1
    g = z(2) ** 2 - z(0)
    s = spoly(f, g, order)
    assert s == -z(2) + z(1) * z(0)
    r = reduce(z(2) ** 2 * z(1), [f, g], order)
    assert r == z(2)
    assert not any(
        all(a <= b for a, b in zip(lead.leading_monomial(order), m)) for lead in (f, g) for m, _ in r
    )


def test_unit_ideal_is_inconsistent():
    with pytest.raises(InconsistentSystemError):
        buchberger([z(1), z(1) - 1], TermOrder.lex([0, 1, 2]))


def test_example1_certificates(example1):
    system = build_system(example1, KernelSelection((FULL, FULL)), Mode.UNNORMALIZED, workers=1)
    (b1, c1), (b2, c2) = certificates(system, workers=1)
    g1 = 5 * z(0) ** 2 * z(1) + 55 * z(0) * z(1) - 88 * z(0) - 60 * z(1) + 160
    g2 = 5 * z(0) ** 2 * z(2) + 55 * z(0) * z(2) + 72 * z(0) - 60 * z(2)
    assert c1.poly.is_proportional(g1)
    assert c2.poly.is_proportional(g2)
    assert c1.var == 1 and c2.var == 2
    assert b1.order.describe() == "z0 < z1 < z2"
    assert b2.order.describe() == "z0 < z2 < z1"
    for basis in (b1, b2):
        assert basis.is_groebner()
        assert all(basis.contains(f) for f in system.polys)
    assert c1.to_text() == g1.primitive(c1.order).to_text(c1.order)


def test_example1_matches_sympy(example1):
    system = build_system(example1, KernelSelection((FULL, FULL)), Mode.UNNORMALIZED, workers=1)
    order = TermOrder.elimination(3, 1)
    ours = buchberger(system.polys, order)
    assert primitive_set(ours.generators, order) == primitive_set(
        sympy_basis(system.polys, order), order
    )


def test_missing_bivariate_element():
    order = TermOrder.lex([0, 1, 2])
    basis = GroebnerBasis((z(1) - z(2),), order)
    with pytest.raises(NoBivariateElementError):
        extract_bivariate(basis, 0)


def random_poly(rng, nvars=3, terms=3, degree=2):
    out = {}
    for _ in range(terms):
        m = [0] * nvars
        for _ in range(rng.randint(0, degree)):
            m[rng.randrange(nvars)] += 1
        out[tuple(m)] = Q(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3))
    return MultiPoly(nvars, out)


def test_random_ideals_against_sympy():
    rng = random.Random(5)
    checked = 0
    while checked < 50:
        gens = [random_poly(rng) for _ in range(rng.randint(2, 3))]
        gens = [g for g in gens if not g.is_zero()]
        if not gens:
            continue
        order = TermOrder.lex(rng.sample(range(3), 3))
        expected = sympy_basis(gens, order)
        if any(p.is_constant() for p in expected):
            with pytest.raises(InconsistentSystemError):
                buchberger(gens, order)
            checked += 1
            continue
        basis = buchberger(gens, order)
        assert basis.is_groebner()
        assert all(basis.contains(g) for g in gens)
        assert primitive_set(basis.generators, order) == primitive_set(expected, order)
        shuffled = buchberger(rng.sample(gens, len(gens)), order)
        assert shuffled.generators == basis.generators
        checked += 1
