"""
Buchberger's algorithm over Q with lexicographic orders, and extraction of
the bivariate polynomials g_s(z0, z_s).

Pairs are chosen by the normal strategy (smallest lcm first) and pruned with
the Gebauer-Moeller criteria. Bases come back reduced, monic and sorted by
ascending leading monomial.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .arith import (
    Monomial,
    MultiPoly,
    TermOrder,
    monomial_div,
    monomial_divides,
    monomial_lcm,
    monomial_mul,
)
from .errors import InconsistentSystemError, NoBivariateElementError, PolynomialError
from .polysys import CoupledSystem
from .workers import ordered_map

log = logging.getLogger("sgalg.groebner")

Pair = Tuple[int, int]


def reduce(p: MultiPoly, basis: Sequence[MultiPoly], order: TermOrder) -> MultiPoly:
    """Full normal form of p modulo basis (no remainder term is divisible by a leading monomial)."""
    if p.is_zero() or not basis:
        return p
    divisors = []
    for g in basis:
        if g.is_zero():
            raise PolynomialError("cannot reduce by the zero polynomial")
        lm = g.leading_monomial(order)
        divisors.append((lm, g.terms[lm], g))

    def heap_key(m: Monomial) -> Tuple[int, ...]:
        return tuple(-e for e in order.key(m))

    work: Dict[Monomial, Fraction] = dict(p.terms)
    heap = [(heap_key(m), m) for m in work]
    heapq.heapify(heap)
    remainder: Dict[Monomial, Fraction] = {}
    while heap:
        _, m = heapq.heappop(heap)
        c = work.pop(m, None)
        if c is None:
            continue
        for lm, lc, g in divisors:
            if monomial_divides(lm, m):
                shift = monomial_div(m, lm)
                factor = c / lc
                for gm, gc in g.terms.items():
                    if gm == lm:
                        continue
                    t = monomial_mul(gm, shift)
                    old = work.get(t)
                    if old is None:
                        work[t] = -factor * gc
                        heapq.heappush(heap, (heap_key(t), t))
                    else:
                        new = old - factor * gc
                        if new:
                            work[t] = new
                        else:
                            del work[t]
                break
        else:
            remainder[m] = c
    return MultiPoly._raw(p.nvars, remainder)


def spoly(f: MultiPoly, g: MultiPoly, order: TermOrder) -> MultiPoly:
    lmf, lmg = f.leading_monomial(order), g.leading_monomial(order)
    L = monomial_lcm(lmf, lmg)
    return f.mul_term(monomial_div(L, lmf), 1 / f.terms[lmf]) - g.mul_term(
        monomial_div(L, lmg), 1 / g.terms[lmg]
    )


def _select(P: Set[Pair], lms: List[Monomial], order: TermOrder) -> Pair:
    def key(pair: Pair):
        L = monomial_lcm(lms[pair[0]], lms[pair[1]])
        return sum(L), order.key(L), pair

    return min(P, key=key)


def _update(
    G: List[MultiPoly], lms: List[Monomial], P: Set[Pair], f: MultiPoly, order: TermOrder
) -> Set[Pair]:
    """Add f to G and return the pruned pair set."""
    lmf = f.leading_monomial(order)
    new = len(G)

    kept = {
        (i, j)
        for i, j in P
        if not monomial_divides(lmf, monomial_lcm(lms[i], lms[j]))
        or monomial_lcm(lms[i], lms[j]) == monomial_lcm(lms[i], lmf)
        or monomial_lcm(lms[i], lms[j]) == monomial_lcm(lms[j], lmf)
    }
    by_lcm: Dict[Monomial, List[int]] = {}
    for i, lm in enumerate(lms):
        by_lcm.setdefault(monomial_lcm(lm, lmf), []).append(i)
    minimal: List[Monomial] = []
    for L in sorted(by_lcm, key=order.key):
        if all(not monomial_divides(M, L) for M in minimal):
            minimal.append(L)
    fresh = set()
    for L in minimal:
        # coprime leading monomials: the S-polynomial reduces to zero
        if not any(L == monomial_mul(lms[i], lmf) for i in by_lcm[L]):
            fresh.add((min(by_lcm[L]), new))
    G.append(f)
    lms.append(lmf)
    return kept | fresh


def _minimalize(G: List[MultiPoly], order: TermOrder) -> List[MultiPoly]:
    kept: List[MultiPoly] = []
    for f in sorted(G, key=lambda h: order.key(h.leading_monomial(order))):
        lm = f.leading_monomial(order)
        if all(not monomial_divides(g.leading_monomial(order), lm) for g in kept):
            kept.append(f)
    return kept


def _interreduce(G: List[MultiPoly], order: TermOrder) -> List[MultiPoly]:
    out = []
    for i, g in enumerate(G):
        out.append(reduce(g, G[:i] + G[i + 1:], order).monic(order))
    return out


def _raise_if_unit(p: MultiPoly) -> None:
    if p.is_constant() and not p.is_zero():
        raise InconsistentSystemError("inconsistent system: the ideal is <1>")


@dataclass(frozen=True)
class GroebnerBasis:
    generators: Tuple[MultiPoly, ...]
    order: TermOrder

    def reduce(self, p: MultiPoly) -> MultiPoly:
        return reduce(p, self.generators, self.order)

    def contains(self, p: MultiPoly) -> bool:
        return self.reduce(p).is_zero()

    def is_groebner(self) -> bool:
        """Every S-polynomial of a basis pair reduces to zero."""
        G = self.generators
        return all(
            self.reduce(spoly(G[i], G[j], self.order)).is_zero()
            for i in range(len(G))
            for j in range(i + 1, len(G))
        )

    def to_text(self) -> str:
        return "\n".join(g.to_text(self.order) for g in self.generators)


def buchberger(gens: Sequence[MultiPoly], order: TermOrder) -> GroebnerBasis:
    F = [f for f in gens if not f.is_zero()]
    if not F:
        raise PolynomialError("cannot compute a basis of the zero ideal")
    G: List[MultiPoly] = []
    lms: List[Monomial] = []
    P: Set[Pair] = set()
    for f in F:
        _raise_if_unit(f)
        P = _update(G, lms, P, f.monic(order), order)

    pairs = reductions = 0
    while P:
        pair = _select(P, lms, order)
        P.remove(pair)
        pairs += 1
        r = reduce(spoly(G[pair[0]], G[pair[1]], order), G, order)
        if not r.is_zero():
            reductions += 1
            _raise_if_unit(r)
            P = _update(G, lms, P, r.monic(order), order)

    basis = _interreduce(_minimalize(G, order), order)
    basis.sort(key=lambda h: order.key(h.leading_monomial(order)))
    log.debug(
        "basis for %s: %d S-pairs, %d nonzero remainders, %d generators",
        order.describe(),
        pairs,
        reductions,
        len(basis),
    )
    return GroebnerBasis(tuple(basis), order)


# ───────────────────────────────────────────────────────────────────────────────
# Bivariate certificates
# ───────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class BivariateCertificate:
    state: int  # 0-based; the polynomial lives in z0 and z_(state+1)
    poly: MultiPoly
    order: TermOrder

    @property
    def var(self) -> int:
        return self.state + 1

    def to_text(self) -> str:
        return self.poly.primitive(self.order).to_text(self.order)


def extract_bivariate(basis: GroebnerBasis, state: int) -> BivariateCertificate:
    """Smallest basis element that involves z_(state+1) and otherwise only z0."""
    var = state + 1
    allowed = {0, var}
    for g in basis.generators:
        used = g.variables()
        if var in used and used <= allowed:
            return BivariateCertificate(state, g, basis.order)
    raise NoBivariateElementError(f"state {var}: no bivariate element in z0, z{var}")


def certificates(
    system: CoupledSystem, workers: Optional[int] = None
) -> List[Tuple[GroebnerBasis, BivariateCertificate]]:
    """One elimination basis and certificate per state."""

    def one(s: int):
        order = TermOrder.elimination(system.nvars, s + 1)
        basis = buchberger(system.polys, order)
        cert = extract_bivariate(basis, s)
        log.info(
            "state %d: basis of %d generators, certificate of degree %d in z%d",
            s + 1,
            len(basis.generators),
            cert.poly.degree(s + 1),
            s + 1,
        )
        return basis, cert

    return ordered_map(one, range(len(system.polys)), workers)
