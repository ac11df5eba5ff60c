"""Quotients of exact (Laurent) polynomials, for operator oracles."""

from __future__ import annotations

from fractions import Fraction

from .exactalg import GaussianRational, LaurentPoly, Poly, diff, logd_op, poly_divmod, poly_gcd


class RatFunc:
    """``num / den`` with exact Poly or LaurentPoly parts (never mixed)."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if den is None:
            den = Poly([1]) if isinstance(num, Poly) else LaurentPoly([1])
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        self.num = num
        self.den = den
        if isinstance(num, Poly) and isinstance(den, Poly):
            self._reduce()

    def _reduce(self):
        g = poly_gcd(self.num, self.den)
        if g.degree > 0:
            self.num = poly_divmod(self.num, g)[0]
            self.den = poly_divmod(self.den, g)[0]
        lc = self.den.lc
        if lc != 1:
            inv = lc.inverse()
            self.num = self.num * inv
            self.den = self.den * inv

    def _lift(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, (int, Fraction, GaussianRational)):
            unit = Poly([1]) if isinstance(self.num, Poly) else LaurentPoly([1])
            return RatFunc(unit * other, unit)
        return RatFunc(other)

    def __add__(self, other):
        o = self._lift(other)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        return RatFunc(self.num * o.den, self.den * o.num)

    def d(self) -> "RatFunc":
        """Derivative d/dz (quotient rule)."""
        return RatFunc(diff(self.num) * self.den - self.num * diff(self.den), self.den * self.den)

    def D(self) -> "RatFunc":
        """``z d/dz`` (quotient rule), for Laurent quotients."""
        return RatFunc(logd_op(self.num) * self.den - self.num * logd_op(self.den),
                       self.den * self.den)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other):
        o = self._lift(other)
        return (self.num * o.den - o.num * self.den).is_zero()

    def ratio_constant(self, other: "RatFunc"):
        """The constant c with self == c * other, or None if none exists."""
        a = self.num * other.den
        b = other.num * self.den
        if b.is_zero():
            return None
        if a.is_zero():
            return GaussianRational(0)
        c = _leading(a) / _leading(b)
        return c if (a - b * c).is_zero() else None

    def __repr__(self):
        return f"RatFunc({self.num!r} / {self.den!r})"


def _leading(p):
    return p.coeffs[-1]
