"""Exact closed arithmetic for spectral functions.

Everything the local L/eps/gamma factors of unramified-type data live in:
a scalar (root of unity times an exact power of q), a monomial q^{-a s},
and multisets of geometric factors

    1 - e^{2 pi i angle} * q^{-(sdir * s + shift)}

in the numerator and denominator.  Angles and shifts are exact rationals, so
detection of zeros and poles at s = 0 is never a tolerance question;
evaluation at a given s uses floating complex arithmetic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional


class PoleError(ArithmeticError):
    """Evaluation at a point where a denominator factor vanishes."""


class RegularizationError(ArithmeticError):
    """Regularization requested for a function with a pole at s = 0."""


class OrderMismatchError(ArithmeticError):
    """Limit requested with the wrong zero/pole order."""


def mod1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


def turn(num, den=None) -> Fraction:
    """An exact angle in turns, reduced to [0, 1)."""
    return mod1(Fraction(num, den) if den is not None else Fraction(num))


@dataclass(frozen=True, order=True)
class GeometricFactor:
    """The factor 1 - e^{2 pi i angle} q^{-(sdir*s + shift)}.

    sdir = +1 gives the familiar 1 - alpha q^{-(s+shift)}; sdir = -1 encodes
    the reflected factors such as 1 - q^{s-1} appearing through L(1-s, .).
    """

    angle: Fraction
    shift: Fraction
    sdir: int = 1

    def __post_init__(self):
        object.__setattr__(self, "angle", mod1(Fraction(self.angle)))
        object.__setattr__(self, "shift", Fraction(self.shift))
        if self.sdir not in (1, -1):
            raise ValueError("sdir must be +1 or -1")

    def vanishes_at_zero(self) -> bool:
        return self.angle == 0 and self.shift == 0

    def value(self, s: complex, q: int) -> complex:
        return 1 - cmath.exp(2j * math.pi * float(self.angle)) * \
            q ** (-(self.sdir * s + float(self.shift)))

    def to_dict(self) -> dict:
        d = {"angle": str(self.angle), "shift": str(self.shift)}
        if self.sdir != 1:
            d["sdir"] = self.sdir
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GeometricFactor":
        return cls(Fraction(d["angle"]), Fraction(d["shift"]), int(d.get("sdir", 1)))


def _sorted(factors: Iterable[GeometricFactor]) -> tuple:
    return tuple(sorted(factors, key=lambda g: (g.sdir, g.shift, g.angle)))


@dataclass(frozen=True)
class SpectralFunction:
    """scalar * q^{-exponent*s} * prod(num) / prod(den).

    The scalar is e^{2 pi i unit_angle} * q^{qpow} when exact; an arbitrary
    complex scalar (evaluation-only paths) is carried in ``inexact`` instead.
    """

    unit_angle: Fraction = Fraction(0)
    qpow: Fraction = Fraction(0)
    exponent: Fraction = Fraction(0)
    num: tuple = ()
    den: tuple = ()
    q: int = 2
    inexact: Optional[complex] = None

    def __post_init__(self):
        object.__setattr__(self, "unit_angle", mod1(Fraction(self.unit_angle)))
        object.__setattr__(self, "qpow", Fraction(self.qpow))
        object.__setattr__(self, "exponent", Fraction(self.exponent))
        object.__setattr__(self, "num", tuple(self.num))
        object.__setattr__(self, "den", tuple(self.den))

    # -- scalar ------------------------------------------------------------

    @property
    def exact_unit(self) -> bool:
        return self.inexact is None

    def scalar_value(self) -> complex:
        if self.inexact is not None:
            return self.inexact
        return cmath.exp(2j * math.pi * float(self.unit_angle)) * \
            float(self.q) ** float(self.qpow)

    # -- algebra -----------------------------------------------------------

    def multiply(self, other: "SpectralFunction") -> "SpectralFunction":
        """Pointwise product; factor lists concatenate, nothing cancels."""
        if self.q != other.q:
            raise ValueError("cannot multiply spectral functions over different q")
        if self.inexact is None and other.inexact is None:
            return SpectralFunction(self.unit_angle + other.unit_angle,
                                    self.qpow + other.qpow,
                                    self.exponent + other.exponent,
                                    self.num + other.num, self.den + other.den,
                                    self.q)
        return SpectralFunction(Fraction(0), Fraction(0),
                                self.exponent + other.exponent,
                                self.num + other.num, self.den + other.den,
                                self.q,
                                inexact=self.scalar_value() * other.scalar_value())

    __mul__ = multiply

    def inverse(self) -> "SpectralFunction":
        if self.inexact is None:
            return SpectralFunction(-self.unit_angle, -self.qpow, -self.exponent,
                                    self.den, self.num, self.q)
        return SpectralFunction(Fraction(0), Fraction(0), -self.exponent,
                                self.den, self.num, self.q,
                                inexact=1.0 / self.inexact)

    def normalize(self) -> "SpectralFunction":
        """Cancel identical numerator/denominator factors and sort."""
        num = list(self.num)
        den = []
        for g in self.den:
            if g in num:
                num.remove(g)
            else:
                den.append(g)
        return SpectralFunction(self.unit_angle, self.qpow, self.exponent,
                                _sorted(num), _sorted(den), self.q, self.inexact)

    def is_one(self) -> bool:
        f = self.normalize()
        return (f.exact_unit and f.unit_angle == 0 and f.qpow == 0
                and f.exponent == 0 and not f.num and not f.den)

    # -- orders and values ---------------------------------------------------

    def ord_zero_at_zero(self) -> int:
        """Exact order of vanishing at s = 0 (negative means a pole)."""
        return sum(1 for g in self.num if g.vanishes_at_zero()) \
            - sum(1 for g in self.den if g.vanishes_at_zero())

    def evaluate(self, s: complex) -> complex:
        val = self.scalar_value() * self.q ** (-float(self.exponent) * s)
        for g in self.num:
            val *= g.value(s, self.q)
        for g in self.den:
            d = g.value(s, self.q)
            if abs(d) < 1e-14:
                raise PoleError(f"denominator factor {g} vanishes at s = {s}")
            val /= d
        return val

    def regularized_value(self) -> complex:
        """lim_{s->0} zeta_F(s)^n f(s) where n = ord_zero_at_zero(f) >= 0.

        Each vanishing numerator factor (1 - q^{-s}) pairs with one zeta_F(s)
        and contributes exactly 1; the rest is evaluated at s = 0.
        """
        n = self.ord_zero_at_zero()
        if n < 0:
            raise RegularizationError("regularization undefined for poles")
        val = self.scalar_value()
        for g in self.num:
            if not g.vanishes_at_zero():
                val *= g.value(0.0, self.q)
        for g in self.den:
            if g.vanishes_at_zero():
                # paired against a numerator zero through the zeta powers
                continue
            val /= g.value(0.0, self.q)
        return val

    def limit_with_power(self, k: int) -> complex:
        """lim_{s->0} s^k f(s) for a function with pole order exactly k at 0.

        Each simple-pole factor (1 - q^{-sdir*s})^{-1} contributes
        sdir / log(q); the regular part is evaluated at 0.
        """
        if self.ord_zero_at_zero() != -k:
            raise OrderMismatchError(
                f"pole order at 0 is {-self.ord_zero_at_zero()}, expected {k}")
        if k == 0:
            return self.evaluate(0.0)
        val = self.scalar_value()
        logq = math.log(self.q)
        for g in self.num:
            if g.vanishes_at_zero():
                # (1 - q^{-sdir*s}) ~ sdir * s log q; cancels one s^{-1}
                val *= g.sdir * logq
            else:
                val *= g.value(0.0, self.q)
        for g in self.den:
            if g.vanishes_at_zero():
                val *= g.sdir / logq
            else:
                val /= g.value(0.0, self.q)
        return val

    # -- constructors and serialization --------------------------------------

    @classmethod
    def one(cls, q: int) -> "SpectralFunction":
        return cls(q=q)

    @classmethod
    def zeta(cls, q: int) -> "SpectralFunction":
        """The local zeta factor (1 - q^{-s})^{-1}."""
        return cls(den=(GeometricFactor(Fraction(0), Fraction(0)),), q=q)

    def to_dict(self) -> dict:
        s = self.scalar_value()
        return {
            "scalar": [s.real, s.imag],
            "exact_unit": self.exact_unit,
            "exponent": str(self.exponent),
            "num": [g.to_dict() for g in _sorted(self.num)],
            "den": [g.to_dict() for g in _sorted(self.den)],
            "q": self.q,
        }
