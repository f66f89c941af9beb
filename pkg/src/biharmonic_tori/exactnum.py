"""Exact arithmetic: rationals, integer square roots and quadratic surds.

Rationals are plain :class:`fractions.Fraction` objects, which are always
stored in lowest terms with a positive denominator, so equality is
structural.  On top of them this module provides

* :class:`SurdValue` -- a single term ``c * sqrt(r)`` with ``c`` rational
  and ``r`` a square-free positive integer;
* :class:`SurdSum` -- a finite rational combination of such terms.

Square roots of distinct square-free integers are linearly independent
over the rationals, so a :class:`SurdSum` is zero iff every coefficient is
zero.  That is what makes exact identity checks possible without floating
point.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterable, Union

from .errors import DomainError

Rational = Fraction

RationalLike = Union[int, Fraction, str]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"n"`` into a normalized fraction."""
    match = _RATIONAL_RE.match(text)
    if match is None:
        raise ValueError(f"not a rational number: {text!r}")
    num = int(match.group(1))
    den = int(match.group(2)) if match.group(2) is not None else 1
    if den == 0:
        raise ZeroDivisionError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(q: Fraction | int) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ints, fractions and ``"p/q"`` strings; floats are refused."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, _RationalABC):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def isqrt(n: int) -> int:
    """Floor of the square root of a nonnegative integer."""
    if n < 0:
        raise ValueError("isqrt of a negative integer")
    return math.isqrt(n)


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def rat_sqrt(q: RationalLike) -> Fraction | None:
    """Exact rational square root of ``q``, or ``None`` if there is none."""
    q = as_rational(q)
    if q < 0:
        raise DomainError("square root of a negative rational")
    # Lowest terms: q is a square iff numerator and denominator both are.
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def squarefree_split(n: int) -> tuple[int, int]:
    """Write ``n = outer**2 * core`` with ``core`` square-free."""
    if n <= 0:
        raise ValueError("squarefree_split needs a positive integer")
    outer, core = 1, 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            outer *= d ** (e // 2)
            if e % 2:
                core *= d
        d += 1 if d == 2 else 2
    core *= n
    return outer, core


@dataclass(frozen=True)
class SurdValue:
    """``coeff * sqrt(radicand)`` with a square-free integer radicand.

    Build instances through :meth:`make` or :meth:`sqrt`; the raw
    constructor assumes the fields are already normalized.
    """

    coeff: Fraction
    radicand: int = 1

    @classmethod
    def make(cls, coeff: RationalLike, radicand: RationalLike = 1) -> SurdValue:
        coeff = as_rational(coeff)
        radicand = as_rational(radicand)
        if radicand < 0:
            raise DomainError("negative radicand")
        if coeff == 0 or radicand == 0:
            return cls(Fraction(0), 1)
        # sqrt(p/q) = sqrt(p*q)/q
        outer, core = squarefree_split(radicand.numerator * radicand.denominator)
        return cls(coeff * outer / radicand.denominator, core)

    @classmethod
    def sqrt(cls, q: RationalLike) -> SurdValue:
        return cls.make(1, q)

    @property
    def is_rational(self) -> bool:
        return self.radicand == 1

    def square(self) -> Fraction:
        return self.coeff * self.coeff * self.radicand

    def sign(self) -> int:
        return (self.coeff > 0) - (self.coeff < 0)

    def __float__(self) -> float:
        return float(self.coeff) * math.sqrt(self.radicand)

    def __neg__(self) -> SurdValue:
        return SurdValue(-self.coeff, self.radicand)

    def __mul__(self, other: SurdValue | RationalLike) -> SurdValue:
        if isinstance(other, SurdValue):
            if self.radicand == other.radicand:
                return SurdValue.make(self.coeff * other.coeff * self.radicand)
            return SurdValue.make(self.coeff * other.coeff, self.radicand * other.radicand)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return SurdValue.make(self.coeff * other, self.radicand)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other: SurdValue | RationalLike) -> SurdValue:
        if isinstance(other, SurdValue):
            if other.coeff == 0:
                raise ZeroDivisionError("division by a zero surd")
            # 1/(c sqrt r) = sqrt(r)/(c r)
            return self * SurdValue(1 / (other.coeff * other.radicand), other.radicand)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return SurdValue.make(self.coeff / other, self.radicand)
        return NotImplemented

    def __str__(self) -> str:
        return format_surd(self)

    @classmethod
    def parse(cls, text: str | int) -> SurdValue:
        return parse_surd(text)


_SURD_RE = re.compile(
    r"^\s*(?:(?P<sign>[+-])?\s*(?P<coeff>\d+(?:/\d+)?)?\s*\*?\s*)?sqrt\(\s*(?P<rad>\d+(?:/\d+)?)\s*\)\s*$"
)


def format_surd(value: SurdValue) -> str:
    if value.radicand == 1 or value.coeff == 0:
        return format_rational(value.coeff)
    root = f"sqrt({value.radicand})"
    if value.coeff == 1:
        return root
    if value.coeff == -1:
        return "-" + root
    return f"{format_rational(value.coeff)}*{root}"


def parse_surd(text: str | int) -> SurdValue:
    """Inverse of :func:`format_surd`; also accepts plain rationals."""
    if isinstance(text, int) and not isinstance(text, bool):
        return SurdValue.make(text)
    if not isinstance(text, str):
        raise TypeError(f"cannot parse a surd from {type(text).__name__}")
    if "sqrt" not in text:
        return SurdValue.make(parse_rational(text))
    match = _SURD_RE.match(text)
    if match is None:
        raise ValueError(f"not a surd: {text!r}")
    coeff = parse_rational(match.group("coeff")) if match.group("coeff") else Fraction(1)
    if match.group("sign") == "-":
        coeff = -coeff
    return SurdValue.make(coeff, parse_rational(match.group("rad")))


class SurdSum:
    """Rational linear combination of square roots of square-free integers."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[SurdValue | RationalLike] = ()) -> None:
        acc: dict[int, Fraction] = {}
        for term in terms:
            if not isinstance(term, SurdValue):
                term = SurdValue.make(term)
            if term.coeff:
                acc[term.radicand] = acc.get(term.radicand, Fraction(0)) + term.coeff
        self._terms = tuple(sorted((r, c) for r, c in acc.items() if c != 0))

    @classmethod
    def of(cls, value: SurdSum | SurdValue | RationalLike) -> SurdSum:
        if isinstance(value, SurdSum):
            return value
        return cls((value,))

    @property
    def terms(self) -> tuple[SurdValue, ...]:
        return tuple(SurdValue(c, r) for r, c in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(r == 1 for r, _ in self._terms)

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self._terms[0][1] if self._terms else Fraction(0)

    def as_surd(self) -> SurdValue | None:
        """The single-term form, when the sum has at most one term."""
        if not self._terms:
            return SurdValue(Fraction(0), 1)
        if len(self._terms) == 1:
            r, c = self._terms[0]
            return SurdValue(c, r)
        return None

    def __float__(self) -> float:
        return math.fsum(float(c) * math.sqrt(r) for r, c in self._terms)

    def __add__(self, other: SurdSum | SurdValue | RationalLike) -> SurdSum:
        try:
            other = SurdSum.of(other)
        except TypeError:
            return NotImplemented
        return SurdSum(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self) -> SurdSum:
        return SurdSum(-t for t in self.terms)

    def __sub__(self, other: SurdSum | SurdValue | RationalLike) -> SurdSum:
        try:
            other = SurdSum.of(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: SurdValue | RationalLike) -> SurdSum:
        return SurdSum.of(other) - self

    def __mul__(self, other: SurdSum | SurdValue | RationalLike) -> SurdSum:
        try:
            other = SurdSum.of(other)
        except TypeError:
            return NotImplemented
        return SurdSum(a * b for a in self.terms for b in other.terms)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (SurdSum, SurdValue, int, Fraction)):
            return (self - other).is_zero()
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._terms)

    def __repr__(self) -> str:
        return f"SurdSum({str(self)!r})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        out = ""
        for i, term in enumerate(self.terms):
            text = format_surd(term)
            if i and not text.startswith("-"):
                text = "+" + text
            out += text
        return out
