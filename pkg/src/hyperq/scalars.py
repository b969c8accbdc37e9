"""Scalar regimes: exact rationals, correctly rounded big floats, and second-order jets.

Three kinds of values flow through every evaluator in this package:

* exact rationals -- stdlib ``fractions.Fraction``;
* ``HighPrecision`` -- a binary float with an explicit working precision,
  every operation rounded to nearest at that precision;
* ``Jet2`` -- a triple (f, f', f'') propagated by the Leibniz and quotient
  rules, over either of the other two regimes.

Mixing regimes is a checked error (``RegimeMismatchError``), never a silent
coercion.  Plain Python ints are the one exception: they are exact in every
regime and may appear as the second operand anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from mpmath import libmp

_RND = "n"  # round to nearest everywhere


class RegimeMismatchError(TypeError):
    """Raised when values from different numeric regimes are combined."""


class HighPrecision:
    """Arbitrary-precision binary float with a fixed working precision.

    Wraps a raw mpmath significand/exponent tuple; every arithmetic
    operation rounds to nearest at ``prec`` bits.  Values are immutable and
    all operations are pure functions of their operands, so instances are
    safe to share between threads.
    """

    __slots__ = ("raw", "prec")

    def __init__(self, raw: tuple, prec: int):
        if prec < 8:
            raise ValueError("working precision must be at least 8 bits")
        self.raw = raw
        self.prec = prec

    # -- construction -----------------------------------------------------

    @classmethod
    def from_int(cls, n: int, prec: int) -> "HighPrecision":
        return cls(libmp.from_int(n, prec, _RND), prec)

    @classmethod
    def from_fraction(cls, x: Union[Fraction, int], prec: int) -> "HighPrecision":
        x = Fraction(x)
        return cls(libmp.from_rational(x.numerator, x.denominator, prec, _RND), prec)

    # -- helpers -----------------------------------------------------------

    def _check(self, other):
        if isinstance(other, HighPrecision):
            if other.prec != self.prec:
                raise RegimeMismatchError(
                    f"working precisions differ: {self.prec} vs {other.prec}"
                )
            return other.raw
        if isinstance(other, int):
            return libmp.from_int(other, self.prec, _RND)
        raise RegimeMismatchError(
            f"cannot combine HighPrecision with {type(other).__name__}"
        )

    def is_zero(self) -> bool:
        return self.raw == libmp.fzero

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        return HighPrecision(libmp.mpf_add(self.raw, self._check(other), self.prec, _RND), self.prec)

    __radd__ = __add__

    def __sub__(self, other):
        return HighPrecision(libmp.mpf_sub(self.raw, self._check(other), self.prec, _RND), self.prec)

    def __rsub__(self, other):
        return HighPrecision(libmp.mpf_sub(self._check(other), self.raw, self.prec, _RND), self.prec)

    def __mul__(self, other):
        return HighPrecision(libmp.mpf_mul(self.raw, self._check(other), self.prec, _RND), self.prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        raw = self._check(other)
        if raw == libmp.fzero:
            raise ZeroDivisionError("division by zero in HighPrecision regime")
        return HighPrecision(libmp.mpf_div(self.raw, raw, self.prec, _RND), self.prec)

    def __rtruediv__(self, other):
        if self.is_zero():
            raise ZeroDivisionError("division by zero in HighPrecision regime")
        return HighPrecision(libmp.mpf_div(self._check(other), self.raw, self.prec, _RND), self.prec)

    def __pow__(self, n):
        if not isinstance(n, int):
            raise RegimeMismatchError("HighPrecision exponents must be integers")
        if n < 0 and self.is_zero():
            raise ZeroDivisionError("zero to a negative power")
        return HighPrecision(libmp.mpf_pow_int(self.raw, n, self.prec, _RND), self.prec)

    def __neg__(self):
        return HighPrecision(libmp.mpf_neg(self.raw, self.prec, _RND), self.prec)

    def __abs__(self):
        return HighPrecision(libmp.mpf_abs(self.raw, self.prec, _RND), self.prec)

    # -- comparison ----------------------------------------------------------

    def _cmp(self, other) -> int:
        return libmp.mpf_cmp(self.raw, self._check(other))

    def __eq__(self, other):
        if isinstance(other, HighPrecision) or isinstance(other, int):
            return self._cmp(other) == 0
        return NotImplemented

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __hash__(self):
        return hash((self.raw, self.prec))

    # -- conversion ----------------------------------------------------------

    def to_fraction(self) -> Fraction:
        """Exact value as a rational (every finite binary float is dyadic)."""
        sign, man, exp, _ = self.raw
        if man == 0 and exp != 0:
            raise ValueError("non-finite HighPrecision value")
        n = -man if sign else man
        if exp >= 0:
            return Fraction(n * (1 << exp))
        return Fraction(n, 1 << -exp)

    def round_to(self, prec: int) -> "HighPrecision":
        """Re-round to a (usually smaller) working precision."""
        return HighPrecision(libmp.mpf_pos(self.raw, prec, _RND), prec)

    def to_decimal(self, dps: int) -> str:
        return libmp.to_str(self.raw, dps)

    def __repr__(self):
        return f"HighPrecision({libmp.to_str(self.raw, max(self.prec // 4, 6))}, prec={self.prec})"


@dataclass(frozen=True)
class Jet2:
    """Value together with raw first and second derivatives (f, f', f'').

    The second component is f'' itself, not the Taylor coefficient f''/2,
    so applying a derivative operator twice to an identity corresponds to
    comparing the ``d2`` components directly.  Arithmetic follows

        d(ab)  = a db + b da
        d2(ab) = a d2b + 2 da db + d2a b

    and the quotient rules induced by them; with Fraction components these
    hold exactly.
    """

    value: Union[Fraction, HighPrecision]
    d1: Union[Fraction, HighPrecision]
    d2: Union[Fraction, HighPrecision]

    def _coerce(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            return other
        if isinstance(other, int):
            z = _zero_like(self.value)
            return Jet2(_const_like(self.value, other), z, z)
        raise RegimeMismatchError(f"cannot combine Jet2 with {type(other).__name__}")

    def __add__(self, other):
        o = self._coerce(other)
        return Jet2(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return Jet2(self.value - o.value, self.d1 - o.d1, self.d2 - o.d2)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return Jet2(
            self.value * o.value,
            self.value * o.d1 + self.d1 * o.value,
            self.value * o.d2 + 2 * (self.d1 * o.d1) + self.d2 * o.value,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if _is_zero(o.value):
            raise ZeroDivisionError("jet division by a jet with zero value component")
        q = self.value / o.value
        q1 = (self.d1 - q * o.d1) / o.value
        q2 = (self.d2 - 2 * (q1 * o.d1) - q * o.d2) / o.value
        return Jet2(q, q1, q2)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __neg__(self):
        return Jet2(-self.value, -self.d1, -self.d2)

    def __pow__(self, n):
        if not isinstance(n, int):
            raise RegimeMismatchError("jet exponents must be integers")
        if n < 0:
            return (self._coerce(1) / self) ** (-n)
        result = self._coerce(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result


Scalar = Union[Fraction, HighPrecision, Jet2]


def _is_zero(x) -> bool:
    if isinstance(x, HighPrecision):
        return x.is_zero()
    return x == 0


def _zero_like(x):
    if isinstance(x, HighPrecision):
        return HighPrecision.from_int(0, x.prec)
    return Fraction(0)


def _one_like(x):
    if isinstance(x, HighPrecision):
        return HighPrecision.from_int(1, x.prec)
    return Fraction(1)


def _const_like(x, n: int):
    if isinstance(x, HighPrecision):
        return HighPrecision.from_int(n, x.prec)
    return Fraction(n)


def scalar_zero(x: Scalar):
    """Additive identity in the regime of ``x``."""
    if isinstance(x, Jet2):
        z = _zero_like(x.value)
        return Jet2(z, z, z)
    return _zero_like(x)


def scalar_one(x: Scalar):
    """Multiplicative identity in the regime of ``x``."""
    if isinstance(x, Jet2):
        z = _zero_like(x.value)
        return Jet2(_one_like(x.value), z, z)
    return _one_like(x)


def is_scalar_zero(x: Scalar) -> bool:
    if isinstance(x, Jet2):
        return _is_zero(x.value) and _is_zero(x.d1) and _is_zero(x.d2)
    return _is_zero(x)


def scalar_combine(kind: str, a: Scalar, b=None) -> Scalar:
    """Single dispatch point for the primitive arithmetic operations.

    ``kind`` is one of ``add``, ``sub``, ``mul``, ``div``, ``neg``,
    ``int-pow``.  For ``int-pow`` the second operand must be a Python int;
    for ``neg`` it is ignored.  Regime mixing raises
    ``RegimeMismatchError``; division by zero (for jets: by a zero value
    component) raises ``ZeroDivisionError``.
    """
    _check_same_regime(kind, a, b)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        if not isinstance(a, (HighPrecision, Jet2)) and _is_zero(b):
            raise ZeroDivisionError("division by zero")
        return a / b
    if kind == "neg":
        return -a
    if kind == "int-pow":
        if not isinstance(b, int):
            raise RegimeMismatchError("int-pow exponent must be an int")
        return int_pow(a, b)
    raise ValueError(f"unknown operation kind: {kind!r}")


def _check_same_regime(kind, a, b):
    if b is None or isinstance(b, int) or kind == "neg":
        return
    for cls in (Fraction, HighPrecision, Jet2):
        if isinstance(a, cls) and not isinstance(b, cls):
            raise RegimeMismatchError(
                f"{kind}: operands live in different regimes "
                f"({type(a).__name__} vs {type(b).__name__})"
            )


def int_pow(x: Scalar, n: int) -> Scalar:
    """x**n for integer n (negative allowed when x is invertible)."""
    if isinstance(x, (HighPrecision, Jet2)):
        return x ** n
    if n < 0:
        if x == 0:
            raise ZeroDivisionError("zero to a negative power")
        return Fraction(1) / (x ** (-n))
    return x ** n


def jet_lift(x: Union[Fraction, HighPrecision, int], active: bool = True) -> Jet2:
    """Seed a jet at the point x: (x, 1, 0) when active, (x, 0, 0) otherwise."""
    if isinstance(x, int):
        x = Fraction(x)
    if not isinstance(x, (Fraction, HighPrecision)):
        raise RegimeMismatchError("jets lift rationals or HighPrecision values")
    one = _one_like(x)
    zero = _zero_like(x)
    return Jet2(x, one if active else zero, zero)


def to_precision(x: Union[Fraction, int], p: int) -> HighPrecision:
    """Nearest p-bit binary float to the rational x (relative error <= 2^(1-p))."""
    return HighPrecision.from_fraction(x, p)


def agree_to(a: HighPrecision, b: HighPrecision, t: int) -> bool:
    """True iff |a - b| <= 2^(-t) * max(1, |a|), compared exactly."""
    if a.prec != b.prec:
        raise RegimeMismatchError("agree_to requires matching working precisions")
    fa, fb = a.to_fraction(), b.to_fraction()
    scale = max(Fraction(1), abs(fa))
    return abs(fa - fb) * (1 << t) <= scale
