"""
Exact scalars, sparse multivariate polynomials over Q, lexicographic term
orders, and dense univariate polynomials with Sturm machinery.

Variables are indexed z_0, z_1, ..., z_N with z_0 standing for the discount
factor and z_s for the (unknown) value of state s.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import PolynomialError

Monomial = Tuple[int, ...]
Scalar = Union[int, Fraction]

_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")


# ───────────────────────────────────────────────────────────────────────────────
# Scalars
# ───────────────────────────────────────────────────────────────────────────────

def parse_rational(text: str) -> Fraction:
    """Parse "num/den" or an integer literal. Floating literals are rejected."""
    token = text.strip()
    if not _RATIONAL_RE.match(token):
        raise ValueError(f"not a rational literal: {text!r}")
    try:
        return Fraction(token)
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in {text!r}") from None


def format_rational(value: Scalar) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def lcm_of_denominators(values: Iterable[Fraction]) -> int:
    result = 1
    for v in values:
        d = Fraction(v).denominator
        result = result * d // gcd(result, d)
    return result


# ───────────────────────────────────────────────────────────────────────────────
# Term orders
# ───────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class TermOrder:
    """Lexicographic order on exponent vectors after a variable permutation.

    ``priority`` lists variable indices from most to least significant, so
    ``TermOrder.lex([0, 1, 2])`` is z_0 < z_1 < z_2 and compares the exponent
    of z_2 first.
    """

    priority: Tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.priority) != list(range(len(self.priority))):
            raise PolynomialError(f"not a permutation of variable indices: {self.priority}")

    @classmethod
    def lex(cls, ascending: Sequence[int]) -> "TermOrder":
        return cls(tuple(reversed(tuple(ascending))))

    @classmethod
    def elimination(cls, nvars: int, state: int) -> "TermOrder":
        """z_0 lowest overall, then z_state, then the other unknowns by index."""
        if not 1 <= state < nvars:
            raise PolynomialError(f"state variable z{state} out of range for {nvars} variables")
        rest = [i for i in range(1, nvars) if i != state]
        return cls.lex([0, state] + rest)

    @property
    def nvars(self) -> int:
        return len(self.priority)

    @property
    def ascending(self) -> Tuple[int, ...]:
        return tuple(reversed(self.priority))

    def key(self, m: Monomial) -> Tuple[int, ...]:
        return tuple(m[i] for i in self.priority)

    def compare(self, a: Monomial, b: Monomial) -> int:
        ka, kb = self.key(a), self.key(b)
        return (ka > kb) - (ka < kb)

    def describe(self) -> str:
        return " < ".join(f"z{i}" for i in self.ascending)


def monomial_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def monomial_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def monomial_divides(a: Monomial, b: Monomial) -> bool:
    """True when a divides b."""
    return all(x <= y for x, y in zip(a, b))


def monomial_div(b: Monomial, a: Monomial) -> Monomial:
    return tuple(y - x for x, y in zip(a, b))


# ───────────────────────────────────────────────────────────────────────────────
# Sparse multivariate polynomials
# ───────────────────────────────────────────────────────────────────────────────

class MultiPoly:
    """Immutable sparse polynomial: monomial -> nonzero Fraction."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Optional[Mapping[Monomial, Scalar]] = None):
        clean: Dict[Monomial, Fraction] = {}
        for m, c in (terms or {}).items():
            m = tuple(int(e) for e in m)
            if len(m) != nvars:
                raise PolynomialError(f"monomial {m} does not have {nvars} exponents")
            if any(e < 0 for e in m):
                raise PolynomialError(f"negative exponent in {m}")
            c = Fraction(c)
            if c:
                clean[m] = clean.get(m, Fraction(0)) + c
                if not clean[m]:
                    del clean[m]
        self.nvars = nvars
        self._terms = clean
        self._hash: Optional[int] = None

    @classmethod
    def _raw(cls, nvars: int, terms: Dict[Monomial, Fraction]) -> "MultiPoly":
        p = cls.__new__(cls)
        p.nvars = nvars
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, value: Scalar) -> "MultiPoly":
        value = Fraction(value)
        return cls._raw(nvars, {(0,) * nvars: value} if value else {})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "MultiPoly":
        if not 0 <= index < nvars:
            raise PolynomialError(f"variable index {index} out of range")
        m = tuple(1 if i == index else 0 for i in range(nvars))
        return cls._raw(nvars, {m: Fraction(1)})

    @classmethod
    def term(cls, nvars: int, monomial: Monomial, coefficient: Scalar) -> "MultiPoly":
        return cls(nvars, {tuple(monomial): coefficient})

    # -- access ----------------------------------------------------------------

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return self._terms

    def coefficient(self, m: Monomial) -> Fraction:
        return self._terms.get(tuple(m), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def constant_value(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def variables(self) -> frozenset:
        return frozenset(i for m in self._terms for i, e in enumerate(m) if e)

    def degree(self, var: Optional[int] = None) -> int:
        if not self._terms:
            return -1
        if var is None:
            return max(sum(m) for m in self._terms)
        return max(m[var] for m in self._terms)

    # -- ordering --------------------------------------------------------------

    def leading_monomial(self, order: TermOrder) -> Monomial:
        if not self._terms:
            raise PolynomialError("zero polynomial has no leading monomial")
        return max(self._terms, key=order.key)

    def leading_coefficient(self, order: TermOrder) -> Fraction:
        return self._terms[self.leading_monomial(order)]

    def sorted_terms(self, order: TermOrder) -> List[Tuple[Monomial, Fraction]]:
        return sorted(self._terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def monic(self, order: TermOrder) -> "MultiPoly":
        lc = self.leading_coefficient(order)
        return self.scale(1 / lc)

    def primitive(self, order: TermOrder) -> "MultiPoly":
        """Integer coefficients with content 1 and positive leading coefficient."""
        if not self._terms:
            return self
        den = lcm_of_denominators(self._terms.values())
        nums = [int(c * den) for c in self._terms.values()]
        content = 0
        for n in nums:
            content = gcd(content, n)
        factor = Fraction(den, content)
        if self.leading_coefficient(order) < 0:
            factor = -factor
        return self.scale(factor)

    # -- arithmetic ------------------------------------------------------------

    def _check(self, other: "MultiPoly") -> None:
        if other.nvars != self.nvars:
            raise PolynomialError(
                f"variable count mismatch: {self.nvars} vs {other.nvars}"
            )

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return MultiPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw(self.nvars, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "MultiPoly":
        return (-self) + other

    def scale(self, factor: Scalar) -> "MultiPoly":
        factor = Fraction(factor)
        if not factor:
            return MultiPoly.zero(self.nvars)
        return MultiPoly._raw(self.nvars, {m: c * factor for m, c in self._terms.items()})

    def mul_term(self, monomial: Monomial, coefficient: Scalar) -> "MultiPoly":
        coefficient = Fraction(coefficient)
        if not coefficient:
            return MultiPoly.zero(self.nvars)
        return MultiPoly._raw(
            self.nvars,
            {monomial_mul(m, monomial): c * coefficient for m, c in self._terms.items()},
        )

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        self._check(other)
        out: Dict[Monomial, Fraction] = {}
        for ma, ca in self._terms.items():
            for mb, cb in other._terms.items():
                m = monomial_mul(ma, mb)
                v = out.get(m, 0) + ca * cb
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return MultiPoly._raw(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "MultiPoly":
        if exponent < 0:
            raise PolynomialError("negative power of a polynomial")
        result = MultiPoly.constant(self.nvars, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self == MultiPoly.constant(self.nvars, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def is_proportional(self, other: "MultiPoly") -> bool:
        """True when self = k * other for one nonzero rational k."""
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        if self._terms.keys() != other._terms.keys():
            return False
        ratio = None
        for m, c in self._terms.items():
            r = c / other._terms[m]
            if ratio is None:
                ratio = r
            elif r != ratio:
                return False
        return True

    # -- evaluation ------------------------------------------------------------

    def substitute(self, var: int, value: Scalar) -> "MultiPoly":
        if not 0 <= var < self.nvars:
            raise PolynomialError(f"variable index {var} out of range for {self.nvars} variables")
        value = Fraction(value)
        out: Dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            e = m[var]
            if e:
                c = c * value**e
                m = m[:var] + (0,) + m[var + 1:]
            if c:
                v = out.get(m, 0) + c
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return MultiPoly._raw(self.nvars, out)

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        if len(point) != self.nvars:
            raise PolynomialError(f"expected {self.nvars} coordinates, got {len(point)}")
        point = [Fraction(x) for x in point]
        total = Fraction(0)
        for m, c in self._terms.items():
            term = c
            for x, e in zip(point, m):
                if e:
                    term *= x**e
            total += term
        return total

    def divide_exact(self, divisor: "MultiPoly", order: Optional[TermOrder] = None) -> "MultiPoly":
        """Quotient of an exact division; raises if the remainder is nonzero."""
        self._check(divisor)
        if divisor.is_zero():
            raise PolynomialError("division by the zero polynomial")
        order = order or TermOrder.lex(range(self.nvars))
        lm_d = divisor.leading_monomial(order)
        lc_d = divisor._terms[lm_d]
        rest = dict(self._terms)
        quotient: Dict[Monomial, Fraction] = {}
        while rest:
            lm = max(rest, key=order.key)
            if not monomial_divides(lm_d, lm):
                raise PolynomialError("polynomial division is not exact")
            q_m = monomial_div(lm, lm_d)
            q_c = rest[lm] / lc_d
            quotient[q_m] = q_c
            for m, c in divisor._terms.items():
                t = monomial_mul(m, q_m)
                v = rest.get(t, 0) - c * q_c
                if v:
                    rest[t] = v
                else:
                    rest.pop(t, None)
        return MultiPoly._raw(self.nvars, quotient)

    # -- text ------------------------------------------------------------------

    def to_text(self, order: Optional[TermOrder] = None, names: Optional[Sequence[str]] = None) -> str:
        if not self._terms:
            return "0"
        order = order or TermOrder.lex(range(self.nvars))
        names = list(names) if names else [f"z{i}" for i in range(self.nvars)]
        parts: List[str] = []
        for m, c in self.sorted_terms(order):
            factors = [
                names[i] if e == 1 else f"{names[i]}^{e}" for i, e in enumerate(m) if e
            ]
            mag = abs(c)
            if factors and mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([format_rational(mag)] + factors)
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"MultiPoly({self.to_text()})"


def poly_arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    if a.nvars != b.nvars:
        raise PolynomialError(f"variable count mismatch: {a.nvars} vs {b.nvars}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise PolynomialError(f"unknown polynomial operation {op!r}")


def substitute(p: MultiPoly, var: int, value: Scalar) -> MultiPoly:
    return p.substitute(var, value)


def parse_poly(text: str, nvars: int) -> MultiPoly:
    """Read back the output of ``MultiPoly.to_text`` (variables named z0, z1, ...)."""
    body = text.replace(" ", "")
    if body in ("", "0"):
        return MultiPoly.zero(nvars)
    if body[0] not in "+-":
        body = "+" + body
    terms: Dict[Monomial, Fraction] = {}
    for sign, chunk in re.findall(r"([+-])([^+-]+)", body):
        coeff = Fraction(1)
        exps = [0] * nvars
        for factor in chunk.split("*"):
            if factor.startswith("z"):
                name, _, power = factor.partition("^")
                index = int(name[1:])
                if index >= nvars:
                    raise PolynomialError(f"variable {name} out of range")
                exps[index] += int(power or 1)
            else:
                coeff *= parse_rational(factor)
        if sign == "-":
            coeff = -coeff
        m = tuple(exps)
        terms[m] = terms.get(m, Fraction(0)) + coeff
    return MultiPoly(nvars, terms)


# ───────────────────────────────────────────────────────────────────────────────
# Dense univariate polynomials
# ───────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class UniPoly:
    """Dense polynomial over Q, coefficients lowest degree first."""

    coeffs: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        cs = [Fraction(c) for c in self.coeffs]
        while cs and not cs[-1]:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_roots(cls, roots: Iterable[Scalar]) -> "UniPoly":
        p = cls((1,))
        for r in roots:
            p = p * cls((-Fraction(r), 1))
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __call__(self, x: Scalar) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def sign_at(self, x: Scalar) -> int:
        v = self(x)
        return (v > 0) - (v < 0)

    def __add__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return UniPoly(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "UniPoly":
        return UniPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other) -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            return UniPoly(tuple(c * other for c in self.coeffs))
        if not self.coeffs or not other.coeffs:
            return UniPoly(())
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UniPoly(tuple(out))

    __rmul__ = __mul__

    def derivative(self) -> "UniPoly":
        return UniPoly(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def divmod(self, divisor: "UniPoly") -> Tuple["UniPoly", "UniPoly"]:
        if divisor.is_zero():
            raise PolynomialError("division by the zero polynomial")
        rem = list(self.coeffs)
        dd = divisor.degree
        lead = divisor.leading
        quot = [Fraction(0)] * max(len(rem) - dd, 0)
        for k in range(len(rem) - dd - 1, -1, -1):
            q = rem[k + dd] / lead
            quot[k] = q
            if q:
                for j, c in enumerate(divisor.coeffs):
                    rem[k + j] -= q * c
        return UniPoly(tuple(quot)), UniPoly(tuple(rem[:dd]) if dd > 0 else ())

    def __mod__(self, divisor: "UniPoly") -> "UniPoly":
        return self.divmod(divisor)[1]

    def __floordiv__(self, divisor: "UniPoly") -> "UniPoly":
        return self.divmod(divisor)[0]

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        return self * (1 / self.leading)

    def primitive(self) -> "UniPoly":
        """Integer coefficients, content 1, positive leading coefficient."""
        if self.is_zero():
            return self
        den = lcm_of_denominators(self.coeffs)
        content = 0
        for c in self.coeffs:
            content = gcd(content, int(c * den))
        factor = Fraction(den, content)
        if self.leading < 0:
            factor = -factor
        return self * factor

    def to_text(self, var: str = "z") -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            mag = abs(c)
            body = mono if mono and mag == 1 else "*".join(x for x in (format_rational(mag), mono) if x)
            parts.append(("-" if c < 0 else "+", body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


def uni_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def to_univariate(p: MultiPoly, var: int) -> UniPoly:
    if not 0 <= var < p.nvars:
        raise PolynomialError(f"variable index {var} out of range")
    others = p.variables() - {var}
    if others:
        raise PolynomialError(
            f"not univariate: involves {', '.join(f'z{i}' for i in sorted(others))} besides z{var}"
        )
    coeffs = [Fraction(0)] * (p.degree(var) + 1 if not p.is_zero() else 0)
    for m, c in p:
        coeffs[m[var]] = c
    return UniPoly(tuple(coeffs))


def content_power(p: MultiPoly, factor: MultiPoly) -> Tuple[int, MultiPoly]:
    """Largest l with factor^l | p, where factor is a nonzero multiple of (1 - z_i)."""
    if p.is_zero():
        raise PolynomialError("content_power of the zero polynomial")
    var = _one_minus_variable(factor)
    scale = factor.constant_value()
    ell = 0
    current = p
    while True:
        quotient = _divide_one_minus(current, var)
        if quotient is None:
            return ell, current
        current = quotient.scale(1 / scale)
        ell += 1


def _one_minus_variable(factor: MultiPoly) -> int:
    c = factor.constant_value()
    linear = [m for m in factor.terms if any(m)]
    if c and len(factor) == 2 and len(linear) == 1 and sum(linear[0]) == 1:
        if factor.coefficient(linear[0]) == -c:
            return linear[0].index(1)
    raise PolynomialError(f"content_power expects a multiple of (1 - z_i), got {factor.to_text()}")


def _divide_one_minus(p: MultiPoly, var: int) -> Optional[MultiPoly]:
    """p / (1 - z_var) when exact, else None."""
    groups: Dict[Monomial, Dict[int, Fraction]] = {}
    for m, c in p:
        rest = m[:var] + (0,) + m[var + 1:]
        groups.setdefault(rest, {})[m[var]] = c
    out: Dict[Monomial, Fraction] = {}
    for rest, by_power in groups.items():
        if sum(by_power.values()) != 0:
            return None
        running = Fraction(0)
        for k in range(max(by_power)):
            running += by_power.get(k, 0)
            if running:
                out[rest[:var] + (k,) + rest[var + 1:]] = running
    return MultiPoly._raw(p.nvars, out)


# ───────────────────────────────────────────────────────────────────────────────
# Sturm sequences
# ───────────────────────────────────────────────────────────────────────────────

def squarefree_part(p: UniPoly) -> UniPoly:
    if p.is_zero():
        raise PolynomialError("squarefree_part of the zero polynomial")
    if p.degree <= 0:
        return UniPoly((1,))
    g = uni_gcd(p, p.derivative())
    return (p // g).primitive()


def sturm_sequence(p: UniPoly) -> List[UniPoly]:
    if p.is_zero():
        raise PolynomialError("sturm_sequence of the zero polynomial")
    chain = [p]
    nxt = p.derivative()
    while not nxt.is_zero():
        chain.append(nxt)
        nxt = -(chain[-2] % chain[-1])
    return chain


def sign_variations(chain: Sequence[UniPoly], x: Optional[Scalar], at_infinity: int = 0) -> int:
    """Sign changes of the chain at x, or at +inf / -inf when x is None."""
    signs = []
    for q in chain:
        if x is None:
            s = (q.leading > 0) - (q.leading < 0)
            if at_infinity < 0 and q.degree % 2:
                s = -s
        else:
            s = q.sign_at(x)
        if s:
            signs.append(s)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(chain: Sequence[UniPoly], lo: Optional[Scalar], hi: Optional[Scalar]) -> int:
    """Distinct real roots in (lo, hi]; None stands for -inf / +inf."""
    return sign_variations(chain, lo, at_infinity=-1) - sign_variations(chain, hi, at_infinity=1)


def cauchy_bound(p: UniPoly) -> Fraction:
    """Every real root lies strictly inside (-B, B)."""
    if p.degree <= 0:
        return Fraction(1)
    lead = abs(p.leading)
    return 1 + max(abs(c) / lead for c in p.coeffs[:-1])
