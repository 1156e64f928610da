"""Exact scalars: rationals, sparse polynomials in weight indeterminates, radicals.

Rationals are plain :class:`fractions.Fraction`. A :class:`Polynomial` mixes
freely with ints and Fractions under ``+``, ``-`` and ``*``, so matrix code can
stay agnostic about which of the two it is holding.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple, Union

Var = Tuple[str, Tuple[int, ...]]
Monomial = Tuple[Tuple[Var, int], ...]
Scalar = Union[int, Fraction]


class MixedRadicandError(ValueError):
    pass


class NegativeRadicandError(ValueError):
    pass


def var_name(v: Var) -> str:
    name, idx = v
    return f"{name}[{','.join(str(i) for i in idx)}]"


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _mono_str(m: Monomial) -> str:
    return "*".join(var_name(v) if e == 1 else f"{var_name(v)}^{e}" for v, e in m)


class Polynomial:
    """Sparse multivariate polynomial with rational coefficients.

    ``terms`` maps a canonical monomial (sorted ``((var, exp), ...)``) to a
    nonzero Fraction. Instances are treated as immutable.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        clean: Dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = Fraction(c)
        self.terms = clean

    @classmethod
    def _raw(cls, terms: Dict[Monomial, Fraction]) -> "Polynomial":
        p = cls.__new__(cls)
        p.terms = terms
        return p

    @classmethod
    def var(cls, name: str, indices: Iterable[int]) -> "Polynomial":
        return cls._raw({(((name, tuple(indices)), 1),): Fraction(1)})

    @classmethod
    def const(cls, c: Scalar) -> "Polynomial":
        return cls._raw({(): Fraction(c)} if c else {})

    # arithmetic -------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Polynomial):
            if len(other.terms) > len(self.terms):
                self, other = other, self
            out = dict(self.terms)
            for m, c in other.terms.items():
                s = out.get(m, 0) + c
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
            return Polynomial._raw(out)
        if isinstance(other, (int, Fraction)):
            if not other:
                return self
            out = dict(self.terms)
            s = out.get((), 0) + other
            if s:
                out[()] = Fraction(s)
            else:
                out.pop((), None)
            return Polynomial._raw(out)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (Polynomial, int, Fraction)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            out: Dict[Monomial, Fraction] = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    m = _mono_mul(m1, m2)
                    s = out.get(m, 0) + c1 * c2
                    if s:
                        out[m] = s
                    else:
                        out.pop(m, None)
            return Polynomial._raw(out)
        if isinstance(other, (int, Fraction)):
            if not other:
                return Polynomial._raw({})
            return Polynomial._raw({m: c * other for m, c in self.terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, e: int):
        out: Polynomial | int = 1
        for _ in range(e):
            out = self * out
        return out if isinstance(out, Polynomial) else Polynomial.const(1)

    # comparison -------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            if not other:
                return not self.terms
            return self.terms == {(): other}
        return NotImplemented

    def __hash__(self):
        if self.is_constant():
            return hash(self.constant())
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    # inspection -------------------------------------------------------------

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def variables(self) -> list:
        vs = set()
        for m in self.terms:
            vs.update(v for v, _ in m)
        return sorted(vs)

    def coefficient(self, monomial: Monomial) -> Fraction:
        return self.terms.get(monomial, Fraction(0))

    def total_degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    def substitute(self, values: Mapping[Var, Scalar]):
        """Evaluate at ``values``; variables missing from ``values`` stay symbolic."""
        out: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            rest = []
            for v, e in m:
                if v in values:
                    c = c * Fraction(values[v]) ** e
                else:
                    rest.append((v, e))
            if c:
                key = tuple(rest)
                s = out.get(key, 0) + c
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return simplify(Polynomial._raw(out))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: mc[0])

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            if not m:
                body = str(abs(c))
            elif abs(c) == 1:
                body = _mono_str(m)
            else:
                body = f"{abs(c)}*{_mono_str(m)}"
            parts.append(("-" if c < 0 else "+", body))
        first_sign, first = parts[0]
        s = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self):
        return f"Polynomial({self})"


RingElement = Union[int, Fraction, Polynomial]


def simplify(x: RingElement) -> RingElement:
    """Collapse constant polynomials to Fractions."""
    if isinstance(x, Polynomial) and x.is_constant():
        return x.constant()
    if isinstance(x, int):
        return Fraction(x)
    return x


def is_zero(x) -> bool:
    return not x


def render(x) -> str:
    if isinstance(x, Radical):
        return str(x)
    if isinstance(x, Polynomial):
        return str(x)
    return str(Fraction(x))


def poly_product(a: RingElement, b: RingElement) -> RingElement:
    return simplify(a * b)


def evaluate(x: RingElement, values: Mapping[Var, Scalar]) -> RingElement:
    if isinstance(x, Polynomial):
        return x.substitute(values)
    return Fraction(x)


def constant_ratio(a: RingElement, b: RingElement):
    """Return the rational c with a == c*b, or None when no such constant exists."""
    a, b = simplify(a), simplify(b)
    if is_zero(b):
        return None
    if is_zero(a):
        return Fraction(0)
    if not isinstance(b, Polynomial):
        return None if isinstance(a, Polynomial) else a / b
    if not isinstance(a, Polynomial):
        return None
    m, cb = min(b.terms.items(), key=lambda mc: mc[0])
    c = a.coefficient(m) / cb
    return c if c and b * c == a else None


# radicals -------------------------------------------------------------------


def square_split(n: int) -> Tuple[int, int]:
    """Write a positive integer as s**2 * d with d squarefree; return (s, d)."""
    if n <= 0:
        raise ValueError("square_split needs a positive integer")
    s, d = 1, 1
    p = 2
    while p * p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                d *= p
        p += 1 if p == 2 else 2
    # what is left has at most two prime factors
    r = math.isqrt(n)
    if r * r == n:
        s *= r
    else:
        d *= n
    return s, d


class Radical:
    """The value ``coefficient * sqrt(radicand)`` with a squarefree integer radicand."""

    __slots__ = ("coefficient", "radicand")

    def __init__(self, coefficient: RingElement, radicand: int = 1):
        coefficient = simplify(coefficient)
        if radicand < 1:
            raise NegativeRadicandError(radicand)
        if is_zero(coefficient):
            radicand = 1
        s, d = square_split(radicand)
        self.coefficient = simplify(coefficient * s) if s != 1 else coefficient
        self.radicand = d

    def __eq__(self, other):
        if isinstance(other, Radical):
            return self.radicand == other.radicand and self.coefficient == other.coefficient
        if isinstance(other, (int, Fraction, Polynomial)):
            return self.radicand == 1 and self.coefficient == other
        return NotImplemented

    def __hash__(self):
        return hash((self.radicand, self.coefficient))

    def __neg__(self):
        return Radical(-self.coefficient, self.radicand)

    def __mul__(self, other):
        if isinstance(other, Radical):
            return radical_combine("multiply", self, other)
        if isinstance(other, (int, Fraction, Polynomial)):
            return Radical(self.coefficient * other, self.radicand)
        return NotImplemented

    __rmul__ = __mul__

    def __add__(self, other):
        if isinstance(other, Radical):
            return radical_combine("add", self, other)
        return NotImplemented

    def is_zero(self) -> bool:
        return is_zero(self.coefficient)

    def __float__(self):
        return float(self.coefficient) * math.sqrt(self.radicand)

    def squared(self) -> RingElement:
        return simplify(self.coefficient * self.coefficient * self.radicand)

    def __str__(self):
        if self.radicand == 1:
            return render(self.coefficient)
        c = render(self.coefficient)
        if isinstance(self.coefficient, Polynomial) and len(self.coefficient.terms) > 1:
            c = f"({c})"
        return f"{c}*sqrt({self.radicand})"

    def __repr__(self):
        return f"Radical({self})"


def radical_combine(op: str, a: Radical, b: Radical) -> Radical:
    if op == "multiply":
        g = math.gcd(a.radicand, b.radicand)
        return Radical(a.coefficient * b.coefficient * g, (a.radicand // g) * (b.radicand // g))
    if op == "add":
        if a.is_zero():
            return b
        if b.is_zero():
            return a
        if a.radicand != b.radicand:
            raise MixedRadicandError(f"sqrt({a.radicand}) + sqrt({b.radicand})")
        return Radical(a.coefficient + b.coefficient, a.radicand)
    raise ValueError(f"unknown op {op!r}")


def radical_normalize(c: RingElement, d_raw: Scalar) -> Radical:
    """Canonical form of ``c * sqrt(d_raw)`` for a rational ``d_raw >= 0``."""
    d_raw = Fraction(d_raw)
    if d_raw < 0:
        raise NegativeRadicandError(d_raw)
    if d_raw == 0:
        return Radical(0)
    p, q = d_raw.numerator, d_raw.denominator
    # sqrt(p/q) = sqrt(p*q)/q
    return Radical(c * Fraction(1, q), p * q)
