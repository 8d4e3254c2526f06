"""Exact rationals with a distinguished prime.

The computational field is Q equipped with its p-adic valuation.  Values are
plain :class:`fractions.Fraction` objects everywhere in the hot paths; the
:class:`PAdicScalar` wrapper exists for callers that want the prime carried
along with the value.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, MalformedRationalError, WindowOverflowError, ZeroDenominatorError

#: valuation of zero; compares above every integer
INF = math.inf

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*([+-]?\d+))?\s*$")


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class ScalarConfig:
    """Prime ``p`` and default truncation depth ``k``; residue field has ``q = p`` elements."""

    p: int = 2
    k: int = 6

    def __post_init__(self):
        if not is_prime(self.p):
            raise DomainError(f"{self.p} is not prime", p=self.p)
        if self.k < 1:
            raise DomainError("precision depth must be positive", k=self.k)

    @property
    def q(self) -> int:
        return self.p


def _vp_int(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(x, p: int):
    """p-adic valuation of a rational; ``INF`` for zero."""
    x = Fraction(x)
    if x == 0:
        return INF
    return _vp_int(x.numerator, p) - _vp_int(x.denominator, p)


def unit_part(x, p: int) -> Fraction:
    """Return ``u`` with ``x == p**valuation(x) * u`` and ``valuation(u) == 0``."""
    x = Fraction(x)
    if x == 0:
        raise DomainError("unit part of zero is undefined")
    return x / Fraction(p) ** valuation(x, p)


def p_power(e: int, p: int) -> Fraction:
    return Fraction(p) ** e


def truncate(x, j: int, p: int, m: int = 0) -> int:
    """Class of ``x`` in p^-m Z_(p) / p^j Z_(p), stored as ``p^m x mod p^(j+m)``.

    Raises :class:`WindowOverflowError` when ``valuation(x) < -m``.
    """
    if j <= -m:
        raise DomainError("truncation depth must exceed the window floor", j=j, m=m)
    x = Fraction(x)
    if valuation(x, p) < -m:
        raise WindowOverflowError("value below the declared window", x=x, m=m)
    y = x * Fraction(p) ** m
    mod = p ** (j + m)
    return (y.numerator * pow(y.denominator, -1, mod)) % mod


def frac_part(y, p: int) -> Fraction:
    """Canonical representative of ``y`` modulo Z_(p): ``r / p^s`` with ``0 <= r < p^s``."""
    y = Fraction(y)
    v = valuation(y, p)
    if v >= 0:
        return Fraction(0)
    s = -v
    mod = p ** s
    scaled = y * mod  # a unit-denominator rational
    r = (scaled.numerator * pow(scaled.denominator, -1, mod)) % mod
    return Fraction(r, mod)


def parse_rational(text) -> Fraction:
    """Parse ``"a/b"`` or ``"a"``; denominators must be nonzero."""
    if isinstance(text, bool):
        raise MalformedRationalError("booleans are not rationals", text=text)
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise MalformedRationalError(f"expected a rational string, got {type(text).__name__}", text=text)
    m = _RATIONAL_RE.match(text)
    if not m:
        raise MalformedRationalError(f"malformed rational {text!r}", text=text)
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ZeroDenominatorError(f"zero denominator in {text!r}", text=text)
    return Fraction(num, den)


def format_rational(x) -> str:
    return str(Fraction(x))


@dataclass(frozen=True)
class PAdicScalar:
    """A rational together with the prime used to value it."""

    value: Fraction
    config: ScalarConfig = ScalarConfig()

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))

    @property
    def p(self) -> int:
        return self.config.p

    def valuation(self):
        return valuation(self.value, self.p)

    def unit_part(self) -> PAdicScalar:
        return PAdicScalar(unit_part(self.value, self.p), self.config)

    def truncate(self, j: int | None = None, m: int = 0) -> int:
        return truncate(self.value, self.config.k if j is None else j, self.p, m)

    def _coerce(self, other):
        if isinstance(other, PAdicScalar):
            if other.config.p != self.config.p:
                raise DomainError("scalars over different primes", p=self.p, q=other.p)
            return other.value
        return Fraction(other)

    def __add__(self, other):
        return PAdicScalar(self.value + self._coerce(other), self.config)

    __radd__ = __add__

    def __sub__(self, other):
        return PAdicScalar(self.value - self._coerce(other), self.config)

    def __rsub__(self, other):
        return PAdicScalar(self._coerce(other) - self.value, self.config)

    def __mul__(self, other):
        return PAdicScalar(self.value * self._coerce(other), self.config)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o == 0:
            raise DomainError("division by zero")
        return PAdicScalar(self.value / o, self.config)

    def __neg__(self):
        return PAdicScalar(-self.value, self.config)

    def __eq__(self, other):
        if isinstance(other, PAdicScalar):
            return self.value == other.value and self.p == other.p
        return self.value == other

    def __hash__(self):
        return hash((self.value, self.p))

    def __str__(self):
        return format_rational(self.value)
