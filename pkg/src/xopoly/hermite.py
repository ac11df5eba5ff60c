"""Complex exceptional Hermite polynomials.

``H_{lambda,l} = Wr(H_l, H_{k_1}, ..., H_{k_n})`` with ``k_i = lambda_i + n - i``,
the Wronskian ``W_lambda = Wr(H_{k_1}, ..., H_{k_n})``, the conjugated
operator ``T_lambda`` and the rational Schrodinger potential of the
Darboux-transformed oscillator.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import mpmath
from mpmath import mp

from .exactalg import (GaussianRational, Poly, count_real_roots, diff, diff_n, poly_divmod, poly_gcd,
                       squarefree_decompose, wronskian)
from .numerics import series_inv, series_mul, taylor_z, working_dps
from .ratfunc import RatFunc
from .roots import RootSet, complex_roots

Z = Poly([0, 1])


class RemovedLevelError(ValueError):
    """The level l coincides with one of the k_i struck out by the Darboux chain."""


class InconsistencyError(RuntimeError):
    """An exact identity that must hold for some constant failed; signals a construction bug."""


@dataclass(frozen=True)
class Partition:
    parts: tuple

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"partition parts must be positive: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"partition parts must be weakly decreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def parse(cls, text: str) -> "Partition":
        text = text.strip().strip("()")
        if text in ("", "0", "empty"):
            return cls(())
        return cls(tuple(int(t) for t in text.replace(" ", "").split(",") if t))

    @property
    def n(self) -> int:
        return len(self.parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def k(self) -> tuple:
        n = self.n
        return tuple(p + n - i for i, p in enumerate(self.parts, start=1))

    def is_double(self) -> bool:
        ps = self.parts
        return len(ps) % 2 == 0 and all(ps[i] == ps[i + 1] for i in range(0, len(ps), 2))

    def __str__(self):
        return "(" + ",".join(map(str, self.parts)) + ")"


def partitions_of(total: int):
    """All partitions of ``total`` as weakly decreasing tuples."""
    def rec(rem, cap):
        if rem == 0:
            yield ()
            return
        for p in range(min(rem, cap), 0, -1):
            for rest in rec(rem - p, p):
                yield (p,) + rest
    return [Partition(p) for p in rec(total, total)]


@lru_cache(maxsize=None)
def hermite_poly(l: int) -> Poly:
    """Physicists' Hermite polynomial, leading coefficient 2**l."""
    if l < 0:
        raise ValueError("Hermite index must be nonnegative")
    if l == 0:
        return Poly([1])
    prev, cur = Poly([1]), Poly([0, 2])
    for j in range(1, l):
        prev, cur = cur, Z * cur * 2 - prev * (2 * j)
    return cur


@lru_cache(maxsize=None)
def w_lambda(lam: Partition) -> Poly:
    return wronskian([hermite_poly(k) for k in lam.k])


@lru_cache(maxsize=None)
def cehp(lam: Partition, l: int) -> Poly:
    if l < 0:
        raise ValueError("level must be nonnegative")
    if l in lam.k:
        raise RemovedLevelError(f"level {l} is removed for partition {lam}")
    return wronskian([hermite_poly(l)] + [hermite_poly(k) for k in lam.k])


class HermiteFamily:
    """W_lambda together with a cache of H_{lambda,l} (single writer, concurrent readers)."""

    def __init__(self, lam: Partition):
        self.lam = lam
        self.W = w_lambda(lam)
        self._cache: dict = {}
        self._lock = threading.Lock()

    def H(self, l: int) -> Poly:
        try:
            return self._cache[l]
        except KeyError:
            pass
        with self._lock:
            if l not in self._cache:
                self._cache[l] = cehp(self.lam, l)
            return self._cache[l]

    def levels(self, lmax: int) -> list:
        return [l for l in range(lmax + 1) if l not in self.lam.k]

    @property
    def removed(self) -> tuple:
        return self.lam.k

    def norm_prediction(self, l: int):
        """sqrt(pi) 2^l l! prod 2(l - k_m), as an exact rational times sqrt(pi)."""
        c = Fraction(2 ** l)
        for j in range(2, l + 1):
            c *= j
        for km in self.lam.k:
            c *= 2 * (l - km)
        return c


def t_lambda_eigencheck(lam: Partition, l: int):
    """Verify -W H'' + 2(zW + W')H' - (W'' + 2zW')H = c W H and return (True, c)."""
    W = w_lambda(lam)
    H = cehp(lam, l)
    W1 = diff(W)
    W2 = diff(W1)
    H1 = diff(H)
    H2 = diff(H1)
    lhs = -(W * H2) + (Z * W + W1) * H1 * 2 - (W2 + Z * W1 * 2) * H
    rhs = W * H
    c = lhs.lc / rhs.lc if not lhs.is_zero() else GaussianRational(0)
    if not (lhs - rhs * c).is_zero():
        raise InconsistencyError(f"T_lambda has no eigenvalue on H_{{{lam},{l}}}")
    return True, c


def schrodinger_eigenvalue(lam: Partition, l: int) -> GaussianRational:
    """Eigenvalue of psi = H e^{-z^2/2} / W under -d^2/dz^2 + u, computed through the potential.

    With psi = e^{-z^2/2} F one has (-d^2 + u) psi = e^{-z^2/2} (-F'' + 2zF' + (1 - z^2)F + uF),
    evaluated here as an exact rational function identity.
    """
    F = RatFunc(cehp(lam, l), w_lambda(lam))
    u = potential(lam).as_ratfunc()
    Zr = RatFunc(Z)
    out = -F.d().d() + Zr * F.d() * 2 + (1 - Zr * Zr) * F + u * F
    c = out.ratio_constant(F)
    if c is None:
        raise InconsistencyError("psi_{lambda,l} is not an eigenfunction of L_lambda")
    return c


def conjugation_oracle_constant(lam: Partition, l: int) -> GaussianRational:
    """T_lambda constant predicted from the Schrodinger operator: E - (2n + 1)."""
    return schrodinger_eigenvalue(lam, l) - (2 * lam.n + 1)


@dataclass
class RationalPotential:
    """u = num / den, exact; ``poly_part`` and ``rem`` from num = q den + rem."""

    num: Poly
    den: Poly
    label: str = ""
    poly_part: Poly = field(init=False)
    rem: Poly = field(init=False)

    def __post_init__(self):
        self.poly_part, self.rem = poly_divmod(self.num, self.den)

    def as_ratfunc(self) -> RatFunc:
        return RatFunc(self.num, self.den)

    def poles(self, precision: float = 1e-30) -> Optional[RootSet]:
        g = poly_gcd(self.num, self.den)
        den = poly_divmod(self.den, g)[0] if g.degree > 0 else self.den
        if den.degree < 1:
            return None
        return complex_roots(den, precision)

    def laurent_at(self, entry, order: int, pole_order: int, factors=None):
        """Coefficients c_r, r = -pole_order .. order, of u at the root ``entry``.

        Exact (GaussianRational) when the root's factor is linear over Q(i);
        otherwise mpmath numbers at the working precision.
        """
        return _laurent_expand(self.num, self.den, entry, order, pole_order, factors)[0]


def _exact_root(entry, factors):
    f, _ = factors[entry.factor]
    if f.degree == 1:
        return -f.coeffs[0] / f.coeffs[1]
    return None


def _laurent_expand(num: Poly, den: Poly, entry, order: int, pole_order: int, factors=None):
    length = pole_order + order + 1
    root = _exact_root(entry, factors) if factors is not None else None
    if root is not None:
        ns = num.taylor_shift(root)
        ds = den.taylor_shift(root)
        v = ds.valuation()
        dcoeffs = list(ds.coeffs[v:]) + [GaussianRational(0)] * length
        ncoeffs = list(ns.coeffs) + [GaussianRational(0)] * length
        inv = [dcoeffs[0].inverse()]
        for k in range(1, length):
            acc = GaussianRational(0)
            for j in range(1, k + 1):
                acc = acc + dcoeffs[j] * inv[k - j]
            inv.append(-acc * inv[0])
        prod = []
        for k in range(length):
            acc = GaussianRational(0)
            for j in range(k + 1):
                acc = acc + ncoeffs[j] * inv[k - j]
            prod.append(acc)
        # u = t^{-v} * prod; report from t^{-pole_order}
        out = {}
        for r in range(-pole_order, order + 1):
            idx = r + v
            out[r] = prod[idx] if 0 <= idx < length else GaussianRational(0)
        return out, True
    with mp.workdps(working_dps()):
        z0 = entry.center
        dser = taylor_z(den, z0, den.degree + 1)
        # valuation from the exact multiplicity structure: count leading negligible terms
        scale = max(abs(c) for c in dser)
        v = 0
        tol = scale * mpmath.mpf(10) ** (-(mp.dps // 2))
        while v < len(dser) and abs(dser[v]) <= tol:
            v += 1
        dtrim = dser[v:] + [mpmath.mpc(0)] * length
        nser = taylor_z(num, z0, length)
        prod = series_mul(nser, series_inv(dtrim, length), length)
        out = {}
        for r in range(-pole_order, order + 1):
            idx = r + v
            out[r] = prod[idx] if 0 <= idx < length else mpmath.mpc(0)
        return out, False


@lru_cache(maxsize=None)
def potential(lam: Partition) -> RationalPotential:
    """u = z^2 + 2n - 2 (log W)'' = [(z^2 + 2n) W^2 - 2 (W W'' - W'^2)] / W^2."""
    W = w_lambda(lam)
    W1 = diff(W)
    W2 = diff(W1)
    num = (Z * Z + 2 * lam.n) * W * W - (W * W2 - W1 * W1) * 2
    den = W * W
    g = poly_gcd(num, den)
    if g.degree > 0:
        num = poly_divmod(num, g)[0]
        den = poly_divmod(den, g)[0]
    lc = den.lc
    return RationalPotential(num * lc.inverse(), den * lc.inverse(), label=f"u_{lam}")


class InsufficientOrderError(ValueError):
    pass


def dg_monodromy_check(u: RationalPotential, roots: Optional[RootSet] = None, order: int = 8,
                       report: Optional[list] = None) -> bool:
    """Duistermaat-Grunbaum local conditions at every pole of ``u``.

    At each pole: only a double pole, c_{-2} = m(m+1) with m a positive
    integer, and c_{2j-1} = 0 for j = 0..m.  ``roots`` are the poles of u
    (roots of its reduced denominator) with exact multiplicities.
    """
    if roots is None:
        roots = u.poles()
    if roots is None:
        return True
    ok = True
    with mp.workdps(working_dps()):
        tol = mpmath.mpf(10) ** (-(working_dps() - 12))
        for e in roots.entries:
            pole_order = e.mult
            coeffs, exact = _laurent_expand(u.num, u.den, e, order, pole_order, roots.factors)
            c2 = coeffs[-2]
            if exact:
                c2_val = c2.re if c2.im == 0 else None
                m = _triangular_index(c2_val) if c2_val is not None else None
            else:
                m = None
                if abs(c2.imag) < tol * (1 + abs(c2)):
                    near = int(mpmath.nint(c2.real))
                    if abs(c2.real - near) < tol * (1 + abs(c2)):
                        m = _triangular_index(Fraction(near))
            higher = [r for r in range(-pole_order, -2) if not _is_zero(coeffs[r], exact, tol)]
            if m is not None and order < 2 * m:
                raise InsufficientOrderError(f"expansion order {order} < 2*{m}")
            passed = m is not None and not higher
            if passed:
                for j in range(0, m + 1):
                    if not _is_zero(coeffs[2 * j - 1], exact, tol):
                        passed = False
            if report is not None:
                report.append({"center": complex(e.center), "c_-2": complex(c2) if not exact else str(c2),
                               "m": m, "exact": exact, "passed": passed})
            ok = ok and passed
    return ok


def _is_zero(c, exact: bool, tol) -> bool:
    if exact:
        return not c
    return abs(c) <= tol


def _triangular_index(c2: Fraction):
    """m >= 1 with m(m+1) == c2, else None."""
    if c2 is None or c2 <= 0 or c2.denominator != 1:
        return None
    v = int(c2)
    m = 1
    while m * (m + 1) < v:
        m += 1
    return m if m * (m + 1) == v else None


@dataclass
class DarbouxResult:
    num: Poly
    den: Poly
    gauss_exponent: Fraction  # psi = num/den * exp(-gauss_exponent * z^2 / 2)


def darboux_chain_apply(lam: Partition, l: int) -> DarbouxResult:
    """psi_l = H_l e^{-z^2/2} pushed through D_n, ..., D_1 (first-order intertwiners).

    D_m = d/dz - (log(Wr_m / Wr_{m+1}))' with Wr_m = Wr(psi_{k_m}, ..., psi_{k_n})
    = W_m exp(-(n - m + 1) z^2 / 2); the exponential part is tracked symbolically.
    """
    if l in lam.k:
        raise RemovedLevelError(f"level {l} is removed for partition {lam}")
    ks = lam.k
    n = lam.n
    # W_m for m = 1..n+1 (W_{n+1} = 1)
    Ws = [wronskian([hermite_poly(k) for k in ks[m - 1:]]) for m in range(1, n + 1)] + [Poly([1])]
    R = RatFunc(hermite_poly(l))
    c = Fraction(1)
    Zr = RatFunc(Z)
    for m in range(n, 0, -1):
        Wm = RatFunc(Ws[m - 1])
        Wn = RatFunc(Ws[m])
        # (log(Wr_m/Wr_{m+1}))' = W_m'/W_m - W_{m+1}'/W_{m+1} - z
        logder = Wm.d() / Wm - Wn.d() / Wn - Zr
        R = R.d() - Zr * R * c - R * logder
    return DarbouxResult(R.num, R.den, c)


def darboux_vs_cehp(lam: Partition, l: int):
    """Proportionality constant between the Darboux chain output and H_{lambda,l}/W_lambda."""
    res = darboux_chain_apply(lam, l)
    return RatFunc(res.num, res.den).ratio_constant(RatFunc(cehp(lam, l), w_lambda(lam)))


def real_regularity(lam: Partition, l: int, roots: Optional[RootSet] = None) -> bool:
    """True iff H_{lambda,l} vanishes at every real zero of W_lambda to at least its multiplicity.

    Decided exactly: for each square-free factor f of W with multiplicity mu,
    the real roots of f must all be roots of gcd(f, H, H', ..., H^{(mu-1)}).
    """
    H = cehp(lam, l)
    W = w_lambda(lam)
    if W.degree < 1:
        return True
    factors = roots.factors if roots is not None else None
    if factors is None:
        factors = squarefree_decompose(W)
    for f, mu in factors:
        nreal = count_real_roots(f)
        if nreal == 0:
            continue
        g = f
        for j in range(mu):
            g = poly_gcd(g, diff_n(H, j))
            if g.degree < 1:
                break
        got = count_real_roots(g) if g.degree >= 1 else 0
        if got != nreal:
            return False
    return True


def spectrum_table(lam: Partition, lmax: int) -> list:
    """Rows (l, eigenvalue 2l+1 of L_lambda, regular on R, removed)."""
    rows = []
    for l in range(lmax + 1):
        removed = l in lam.k
        regular = None if removed else real_regularity(lam, l)
        rows.append({"l": l, "eigenvalue": 2 * l + 1, "regular": regular, "removed": removed})
    return rows
