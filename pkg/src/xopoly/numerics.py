"""Bridges from exact objects to mpmath numbers, and local Taylor series.

All floating point in the package goes through mpmath at a configurable
working precision (``XOPOLY_PRECISION`` decimal digits, default 40).
"""

from __future__ import annotations

import os
from typing import Sequence

import mpmath
from mpmath import mp

from .exactalg import GaussianRational, LaurentPoly, Poly

DEFAULT_DPS = 40


def working_dps() -> int:
    raw = os.environ.get("XOPOLY_PRECISION")
    if raw:
        try:
            dps = int(raw)
        except ValueError:
            raise ValueError(f"XOPOLY_PRECISION must be an integer, got {raw!r}")
        if dps < 16:
            raise ValueError("XOPOLY_PRECISION below 16 digits is not supported")
        return dps
    return DEFAULT_DPS


def to_mpc(x) -> mpmath.mpc:
    if isinstance(x, GaussianRational):
        return mpmath.mpc(mpmath.mpf(x.re.numerator) / x.re.denominator,
                          mpmath.mpf(x.im.numerator) / x.im.denominator)
    return mpmath.mpc(x)


def mp_coeffs(p: Poly | LaurentPoly) -> list:
    return [to_mpc(c) for c in p.coeffs]


def horner(coeffs: Sequence, z):
    acc = mpmath.mpc(0)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def eval_poly(p, z):
    """Evaluate a Poly, LaurentPoly or NumericPoly at an mpmath point."""
    if isinstance(p, LaurentPoly):
        return horner(mp_coeffs(p), z) * z ** p.lo
    if isinstance(p, Poly):
        return horner(mp_coeffs(p), z)
    return p(z)


class NumericPoly:
    """Laurent-style polynomial with mpmath coefficients (lo may be negative).

    Used for nullspace bases whose coefficients are only known numerically.
    """

    def __init__(self, coeffs: Sequence, lo: int = 0):
        self.coeffs = [mpmath.mpc(c) for c in coeffs]
        self.lo = lo

    @property
    def hi(self) -> int:
        return self.lo + len(self.coeffs) - 1

    def __call__(self, z):
        return horner(self.coeffs, z) * (z ** self.lo if self.lo else 1)

    def __getitem__(self, e: int):
        j = e - self.lo
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return mpmath.mpc(0)

    def terms(self):
        for j, c in enumerate(self.coeffs):
            yield self.lo + j, c

    def __add__(self, other: "NumericPoly") -> "NumericPoly":
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        return NumericPoly([self[e] + other[e] for e in range(lo, hi + 1)], lo)

    def scale(self, c) -> "NumericPoly":
        return NumericPoly([c * x for x in self.coeffs], self.lo)

    def schwarz_conj(self) -> "NumericPoly":
        return NumericPoly([mpmath.conj(c) for c in self.coeffs], self.lo)

    def dagger(self) -> "NumericPoly":
        return NumericPoly([mpmath.conj(c) for c in reversed(self.coeffs)], -self.hi)

    def max_abs(self):
        return max((abs(c) for c in self.coeffs), default=mpmath.mpf(0))

    @classmethod
    def from_exact(cls, p: Poly | LaurentPoly) -> "NumericPoly":
        lo = p.lo if isinstance(p, LaurentPoly) else 0
        return cls(mp_coeffs(p), lo)

    def to_json(self) -> dict:
        from fractions import Fraction
        out = []
        for c in self.coeffs:
            re = Fraction(float(c.real))
            im = Fraction(float(c.imag))
            out.append([re.numerator, re.denominator, im.numerator, im.denominator])
        return {"lo": self.lo, "coeffs": out}


def as_numeric(p) -> NumericPoly:
    if isinstance(p, NumericPoly):
        return p
    return NumericPoly.from_exact(p)


# -- local series ----------------------------------------------------------

def series_mul(a: Sequence, b: Sequence, order: int) -> list:
    out = [mpmath.mpc(0)] * order
    for i, x in enumerate(a[:order]):
        if x == 0:
            continue
        for j in range(min(len(b), order - i)):
            out[i + j] += x * b[j]
    return out


def series_inv(a: Sequence, order: int) -> list:
    if a[0] == 0:
        raise ZeroDivisionError("series with vanishing constant term")
    inv0 = 1 / a[0]
    out = [inv0]
    for k in range(1, order):
        acc = mpmath.mpc(0)
        for j in range(1, min(k, len(a) - 1) + 1):
            acc += a[j] * out[k - j]
        out.append(-acc * inv0)
    return out


def taylor_z(p, z0, order: int) -> list:
    """Taylor coefficients of ``p`` (polynomial or Laurent) at ``z0`` in ``t = z - z0``."""
    p = as_numeric(p)
    out = [mpmath.mpc(0)] * order
    for e, c in p.terms():
        if c == 0:
            continue
        # z**e = z0**e * (1 + t/z0)**e, generalised binomial for negative e
        if e >= 0 and z0 == 0:
            if e < order:
                out[e] += c
            continue
        base = c * z0 ** e
        binom = mpmath.mpf(1)
        for r in range(order):
            if r > 0:
                binom = binom * (e - r + 1) / r
                if binom == 0:
                    break
            out[r] += base * binom / z0 ** r
    return out


def taylor_exp_phase(p, z0, order: int) -> list:
    """Taylor coefficients in ``t`` of ``p(z0 * exp(i t))`` (Laurent variable change z = e^{ix})."""
    p = as_numeric(p)
    out = [mpmath.mpc(0)] * order
    for e, c in p.terms():
        if c == 0:
            continue
        base = c * z0 ** e
        term = mpmath.mpc(1)
        for r in range(order):
            if r > 0:
                term = term * (1j * e) / r
            out[r] += base * term
    return out


def taylor_gaussian(z0, order: int, scale=mpmath.mpf(1) / 2) -> list:
    """Taylor coefficients of ``exp(-scale * z**2)`` at ``z0``."""
    a = [mpmath.mpc(0)] * order
    # exp(-scale*(z0+t)^2) = exp(-scale z0^2) exp(-2 scale z0 t) exp(-scale t^2)
    lin = [(-2 * scale * z0) ** r / mpmath.factorial(r) for r in range(order)]
    quad = [mpmath.mpc(0)] * order
    for r in range(0, order, 2):
        quad[r] = (-scale) ** (r // 2) / mpmath.factorial(r // 2)
    a = series_mul(lin, quad, order)
    c = mpmath.exp(-scale * z0 * z0)
    return [c * x for x in a]


def vanishing_order(series: Sequence, tol) -> int:
    for j, c in enumerate(series):
        if abs(c) > tol:
            return j
    return len(series)
