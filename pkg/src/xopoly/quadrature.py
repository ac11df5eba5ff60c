"""Contour quadrature rules and local residue evaluation.

Integrands are vector valued (a list of mpmath numbers per node) so that a
whole Gram matrix shares one set of nodes.
"""

from __future__ import annotations

from functools import lru_cache

import mpmath
from mpmath import mp
from mpmath.calculus.quadrature import GaussLegendre

from .numerics import series_inv, series_mul

GL_LEVEL = 4  # 24 nodes per panel
N_START = 64
N_CAP = 2 ** 20


class QuadratureError(RuntimeError):
    def __init__(self, msg: str, estimates=None):
        super().__init__(msg)
        self.estimates = estimates


@lru_cache(maxsize=None)
def _gl_nodes(prec: int):
    return GaussLegendre(mp).calc_nodes(GL_LEVEL, prec)


def _vmax(vec) -> mpmath.mpf:
    return max((abs(v) for v in vec), default=mpmath.mpf(0))


def _vdiff(a, b) -> mpmath.mpf:
    return max((abs(x - y) for x, y in zip(a, b)), default=mpmath.mpf(0))


def line_panels(fn, xi, a, b, panels: int) -> list:
    """Composite Gauss-Legendre sum of fn(x + i xi) over [a, b]."""
    nodes = _gl_nodes(mp.prec)
    h = (b - a) / panels
    acc = None
    for k in range(panels):
        mid = a + (k + mpmath.mpf(1) / 2) * h
        for x, w in nodes:
            vals = fn(mpmath.mpc(mid + x * h / 2, xi))
            wt = w * h / 2
            if acc is None:
                acc = [wt * v for v in vals]
            else:
                for i, v in enumerate(vals):
                    acc[i] += wt * v
    return acc


def truncation_radius(fn, xi, tol, r_min=4, r_max=60):
    """Smallest R (step 1/2) with the integrand negligible at +-R.

    The tail is pushed to the working precision rather than to ``tol``: Gram
    entries that should vanish are compared in absolute terms, and the
    Gaussian decay makes the extra length cheap.
    """
    samples = [_vmax(fn(mpmath.mpc(x, xi))) for x in range(-r_min, r_min + 1)]
    scale = max(max(samples), 1)
    r = mpmath.mpf(r_min)
    while r <= r_max:
        edge = max(_vmax(fn(mpmath.mpc(r, xi))), _vmax(fn(mpmath.mpc(-r, xi))))
        if edge < min(tol, mpmath.mpf(10) ** (5 - mp.dps)) * scale * mpmath.mpf(10) ** -3:
            return r
        scale = max(scale, edge)
        r += mpmath.mpf(1) / 2
    raise QuadratureError(f"integrand does not decay on the line Im z = {xi}")


def integrate_line(fn, xi, tol=1e-12, pole_distance=None, max_doublings=5):
    """Integral of fn over i xi + R (vector valued), panel doubling until stable.

    Panels start no wider than the distance to the nearest pole so each one
    sees a comfortably analytic integrand.
    """
    xi = mpmath.mpf(xi)
    R = truncation_radius(fn, xi, tol)
    width = mpmath.mpf(1)
    if pole_distance is not None and pole_distance < width:
        width = mpmath.mpf(pole_distance)
    panels = int(mpmath.ceil(2 * R / width))
    prev = line_panels(fn, xi, -R, R, panels)
    for _ in range(max_doublings):
        panels *= 2
        cur = line_panels(fn, xi, -R, R, panels)
        if _vdiff(cur, prev) < tol * (1 + _vmax(cur)):
            return cur
        prev = cur
    raise QuadratureError("line quadrature did not converge", (prev, cur))


def circle_nodes(mu, N: int):
    return [mpmath.mpf(mu) * mpmath.expjpi(mpmath.mpf(2 * k) / N) for k in range(N)]


def integrate_circle(fn, mu, tol=1e-12, n_start=N_START, n_cap=N_CAP):
    """(1/2 pi i) * contour integral of fn(z) dz/z over |z| = mu by the uniform rule.

    Doubling reuses the previous nodes (odd-indexed nodes are the new ones).
    """
    mu = mpmath.mpf(mu)
    N = n_start
    sums = None
    for z in circle_nodes(mu, N):
        vals = fn(z)
        if sums is None:
            sums = list(vals)
        else:
            for i, v in enumerate(vals):
                sums[i] += v
    prev = [s / N for s in sums]
    while 2 * N <= n_cap:
        for k in range(N):
            vals = fn(mu * mpmath.expjpi(mpmath.mpf(2 * k + 1) / N))
            for i, v in enumerate(vals):
                sums[i] += v
        N *= 2
        cur = [s / N for s in sums]
        if _vdiff(cur, prev) < tol * (1 + _vmax(cur)):
            return cur
        prev = cur
    raise QuadratureError(f"circle quadrature did not converge with {N} nodes", (prev,))


def residue_from_series(num, den_tail, order: int):
    """Residue of t^{-order} * num(t) / den_tail(t), series given in t = z - z0.

    ``den_tail`` are the Taylor coefficients of the denominator divided by
    t^order (its first ``order`` coefficients already removed).
    """
    if order <= 0:
        return mpmath.mpc(0)
    inv = series_inv(den_tail[:order], order)
    return series_mul(num[:order], inv, order)[order - 1]
