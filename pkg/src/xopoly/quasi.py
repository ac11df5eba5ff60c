"""Quasi-invariance at the zeros of the family Wronskian.

At a zero ``z_i`` of multiplicity ``mu`` the local trivial-monodromy order is
``m`` with ``mu = m(m+1)/2``.  A function ``psi`` with a pole of order at most
``mu`` there is quasi-invariant when ``psi (z - z_i)^m`` is analytic and its
odd Taylor coefficients up to order ``2m - 1`` vanish.  Writing
``psi = s(t) / t^mu`` with ``t = z - z_i`` this is

    s_0 = ... = s_{mu-m-1} = 0   and   s_{mu-m+r} = 0 for r = 1, 3, ..., 2m-1,

which is ``mu`` linear conditions on the numerator polynomial.

Hermite families use ``psi = p e^{-z^2/2} / W`` in the variable ``z``;
Laurent families use ``Phi(x) = (P / W)(e^{ix})`` in the variable ``x``
around ``x_i = -i log z_i`` (principal branch).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import mpmath
from mpmath import mp

from .exactalg import GaussianRational, LaurentPoly, Poly
from .hermite import HermiteFamily, hermite_poly
from .laurent import LaurentFamily
from .numerics import (NumericPoly, as_numeric, series_inv, series_mul, taylor_exp_phase,
                       taylor_gaussian, taylor_z, working_dps)
from .roots import REAL, UNIT_CIRCLE, RootEntry, RootSet, complex_roots, dg_order

ALL = "ALL"
SELECTIONS = ("ALL", REAL, UNIT_CIRCLE)

QUASI_TOL = 1e-20
RANK_CUTOFF = 1e-10
GAP_MIN = 1e4
ROOT_PRECISION = 1e-30

DECIDED = "DECIDED"
UNDECIDED = "UNDECIDED"


class InconsistentInputError(ValueError):
    pass


class WindowTooSmallError(ValueError):
    def __init__(self, msg: str, required):
        super().__init__(msg)
        self.required = required


class CodimMismatchError(RuntimeError):
    pass


def local_dps() -> int:
    return max(60, 2 * working_dps())


# -- family adapters --------------------------------------------------------

def family_roots(fam) -> Optional[RootSet]:
    """Certified roots of the family Wronskian (cached on the family); None if constant."""
    rs = getattr(fam, "_rootset", False)
    if rs is not False:
        return rs
    W = fam.W
    deg = W.degree if isinstance(W, Poly) else W.hi - W.lo
    if deg < 1:
        rs = None
    elif isinstance(fam, HermiteFamily):
        rs = complex_roots(W, ROOT_PRECISION, policy="real")
    else:
        rs = complex_roots(W, ROOT_PRECISION, policy="circle")
    fam._rootset = rs
    return rs


def select_roots(fam, selection: str) -> list:
    if selection not in SELECTIONS:
        raise ValueError(f"unknown root selection {selection!r}")
    rs = family_roots(fam)
    if rs is None:
        return []
    if selection == ALL:
        return list(rs.entries)
    return rs.of_class(selection)


def is_hermite(fam) -> bool:
    return isinstance(fam, HermiteFamily)


def numer_series(fam, p, z0, order: int, gauss_scale=mpmath.mpf(1) / 2) -> list:
    """Taylor series at the root of p times the family's entire factor."""
    if is_hermite(fam):
        return series_mul(taylor_z(p, z0, order), taylor_gaussian(z0, order, gauss_scale), order)
    return taylor_exp_phase(p, z0, order)


def magnitude_series(fam, p, z0, order: int, gauss_scale=mpmath.mpf(1) / 2) -> list:
    """Term-wise absolute bounds for the coefficients of :func:`numer_series`.

    Summing magnitudes instead of signed terms bounds the rounding error of
    each coefficient, so it stays meaningful when p itself vanishes at z0.
    """
    q = as_numeric(p)
    r0 = abs(z0)
    out = [mpmath.mpf(0)] * order
    for e, c in q.terms():
        if c == 0:
            continue
        base = abs(c) * r0 ** e if r0 else (abs(c) if e == 0 else mpmath.mpf(0))
        if is_hermite(fam):
            # sum_e |c_e| binom(e, r) |z0|^(e - r)
            binom = mpmath.mpf(1)
            for r in range(min(order, e + 1)):
                if r > 0:
                    binom = binom * (e - r + 1) / r
                out[r] += abs(c) * binom * r0 ** (e - r)
        else:
            term = mpmath.mpf(1)
            for r in range(order):
                if r > 0:
                    term = term * abs(e) / r
                out[r] += base * term
    if is_hermite(fam):
        g = [abs(x) for x in taylor_gaussian(z0, order, gauss_scale)]
        out = series_mul(out, g, order)
    return out


def denom_series(fam, z0, order: int) -> list:
    if is_hermite(fam):
        return taylor_z(fam.W, z0, order)
    return taylor_exp_phase(fam.W, z0, order)


def _split_vanishing(den: list, mu: int) -> list:
    """Drop the first mu (numerically vanishing) coefficients, checking the order."""
    scale = max(abs(c) for c in den)
    tiny = scale * mpmath.mpf(10) ** (-(mp.dps // 2))
    if any(abs(c) > tiny for c in den[:mu]) or abs(den[mu]) <= tiny:
        raise InconsistentInputError(f"Wronskian does not vanish to order exactly {mu} at the root")
    return den[mu:]


def condition_indices(mu: int) -> list:
    m = dg_order(mu)
    return list(range(mu - m)) + [mu - m + r for r in range(1, 2 * m, 2)]


class _RootLocal:
    """Local data at one root: the Taylor series of 1/V where W = t^mu V."""

    def __init__(self, fam, entry: RootEntry):
        self.entry = entry
        self.mu = entry.mult
        self.m = dg_order(self.mu)
        self.order = self.mu + self.m
        self.idx = condition_indices(self.mu)
        self.fam = fam
        den = denom_series(fam, entry.center, self.mu + self.order)
        self.inv = series_inv(_split_vanishing(den, self.mu), self.order)
        self.inv_abs = [abs(c) for c in self.inv]

    def coefficients(self, p):
        """(s, scale): the series s of p E / V and the magnitude of its terms."""
        num = numer_series(self.fam, p, self.entry.center, self.order)
        s = series_mul(num, self.inv, self.order)
        mag = magnitude_series(self.fam, p, self.entry.center, self.order)
        scale = max((abs(x) for x in series_mul(mag, self.inv_abs, self.order)), default=mpmath.mpf(0))
        return s, scale

    def functionals(self, p) -> list:
        s, _ = self.coefficients(p)
        return [s[j] for j in self.idx]


def is_quasi_invariant(p, fam, entry: RootEntry, tol: float = QUASI_TOL) -> bool:
    with mp.workdps(local_dps()):
        loc = _RootLocal(fam, entry)
        s, scale = loc.coefficients(p)
        bound = tol * scale
        return all(abs(s[j]) <= bound for j in loc.idx)


def quasi_invariant_everywhere(p, fam, selection: str = ALL, tol: float = QUASI_TOL) -> bool:
    return all(is_quasi_invariant(p, fam, e, tol) for e in select_roots(fam, selection))


def reflection_defect(p, fam, entry: RootEntry):
    """Max |odd coefficient| of (psi (z-z_i)^m) below order m, relative to its scale.

    Small values mean psi(sigma_i z) = (-1)^m psi(z) + O((z - z_i)^m).
    """
    with mp.workdps(local_dps()):
        loc = _RootLocal(fam, entry)
        s, scale = loc.coefficients(p)
        shift = loc.mu - loc.m
        odd = [abs(s[shift + r]) for r in range(1, loc.m, 2)]
        return max(odd, default=mpmath.mpf(0)) / (scale or 1)


# -- coordinate bases -------------------------------------------------------

@lru_cache(maxsize=None)
def _hermite_normal(d: int, dps: int) -> NumericPoly:
    with mp.workdps(dps):
        norm = mpmath.sqrt(mpmath.mpf(2) ** d * mpmath.factorial(d) * mpmath.sqrt(mpmath.pi))
        return NumericPoly([c / norm for c in as_numeric(hermite_poly(d)).coeffs])


def coordinate_basis(fam, window) -> list:
    """Normalised Hermite polynomials h_0..h_d (Hermite) or monomials z^lo..z^hi (Laurent)."""
    lo, hi = window
    if is_hermite(fam):
        return [_hermite_normal(d, local_dps()) for d in range(lo, hi + 1)]
    return [NumericPoly([1], e) for e in range(lo, hi + 1)]


def combine(basis: Sequence[NumericPoly], coords: Sequence) -> NumericPoly:
    acc = NumericPoly([0])
    for b, c in zip(basis, coords):
        if c != 0:
            acc = acc + b.scale(c)
    return acc


def default_window(fam):
    if is_hermite(fam):
        return (0, max(8, fam.lam.size + 4))
    n = fam.kappa.k[0] + fam.kappa.size + 2 if fam.kappa.n else 4
    return (-n, n)


# -- rank decisions ---------------------------------------------------------

@dataclass
class RankDecision:
    rank: int
    singular_values: list
    gap: mpmath.mpf
    status: str


def decide_rank(svals: Sequence, cutoff: float = RANK_CUTOFF, gap_min: float = GAP_MIN) -> RankDecision:
    """Relative singular-value cutoff with a required gap between kept and discarded values."""
    s = sorted((mpmath.mpf(abs(x)) for x in svals), reverse=True)
    if not s or s[0] == 0:
        return RankDecision(0, s, mpmath.inf, DECIDED)
    cut = cutoff * s[0]
    kept = [x for x in s if x > cut]
    dropped = [x for x in s if x <= cut]
    if dropped:
        gap = kept[-1] / dropped[0] if dropped[0] > 0 else mpmath.inf
    else:
        gap = kept[-1] / cut
    return RankDecision(len(kept), s, gap, DECIDED if gap >= gap_min else UNDECIDED)


def nullspace(rows: list, ncols: int):
    """(null vectors as coordinate lists, RankDecision) via a complex SVD."""
    if not rows:
        eye = [[mpmath.mpc(int(i == j)) for j in range(ncols)] for i in range(ncols)]
        return eye, RankDecision(0, [], mpmath.inf, DECIDED)
    A = mpmath.matrix(rows)
    U, S, V = mpmath.svd_c(A, full_matrices=True)
    svals = [S[i] for i in range(min(A.rows, A.cols))]
    dec = decide_rank(svals)
    null = []
    for i in range(dec.rank, ncols):
        null.append([mpmath.conj(V[i, j]) for j in range(ncols)])
    return null, dec


# -- quasi-invariant subspaces ---------------------------------------------

@dataclass
class QuasiBasis:
    family: str
    selection: str
    window: tuple
    coords: list
    polys: list
    n_constraints: int
    rank: RankDecision
    coordinate_basis: list = field(repr=False, default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def status(self) -> str:
        return self.rank.status

    def random_element(self, rng: random.Random) -> NumericPoly:
        cs = [mpmath.mpc(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in self.coords]
        with mp.workdps(local_dps()):
            out = [sum(c * v[j] for c, v in zip(cs, self.coords)) for j in range(len(self.coordinate_basis))]
            return combine(self.coordinate_basis, out)

    def to_json(self) -> dict:
        return {"family": self.family, "selection": self.selection, "window": list(self.window),
                "dim": self.dim, "constraints": self.n_constraints, "rank": self.rank.rank,
                "rank_gap": mpmath.nstr(self.rank.gap, 6), "status": self.status,
                "singular_values": [mpmath.nstr(s, 6) for s in self.rank.singular_values],
                "basis": [p.to_json() for p in self.polys]}


def family_label(fam) -> str:
    return f"hermite lambda={fam.lam}" if is_hermite(fam) else f"laurent {fam.label()}"


def constraint_rows(fam, selection: str, basis: Sequence) -> list:
    rows = []
    for e in select_roots(fam, selection):
        loc = _RootLocal(fam, e)
        cols = [loc.functionals(b) for b in basis]
        for r in range(len(loc.idx)):
            row = [cols[c][r] for c in range(len(basis))]
            nrm = mpmath.sqrt(sum(abs(x) ** 2 for x in row))
            rows.append([x / nrm for x in row] if nrm else row)
    return rows


def quasi_basis(fam, selection: str = ALL, window=None) -> QuasiBasis:
    """Numerical basis of the quasi-invariant subspace restricted to a degree window."""
    if window is None:
        window = default_window(fam)
    window = tuple(window)
    if is_hermite(fam) and window[0] != 0:
        raise ValueError("Hermite windows start at degree 0")
    with mp.workdps(local_dps()):
        basis = coordinate_basis(fam, window)
        rows = constraint_rows(fam, selection, basis)
        null, dec = nullspace(rows, len(basis))
        polys = [combine(basis, v) for v in null]
    return QuasiBasis(family_label(fam), selection, window, null, polys, len(rows), dec, basis)


def _exact_rank(vectors: list) -> int:
    rows = [list(v) for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][c].inverse()
        for r in range(len(rows)):
            if r != rank and rows[r][c]:
                f = rows[r][c] * inv
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def required_window(fam) -> int:
    if is_hermite(fam):
        lam = fam.lam
        return lam.size + (lam.parts[0] if lam.n else 0)
    return 2 * fam.kappa.size + (fam.kappa.k[0] if fam.kappa.n else 0)


def family_members(fam, window) -> list:
    """Exceptional family members lying inside the window."""
    lo, hi = window
    if is_hermite(fam):
        lam = fam.lam
        top = hi - lam.size + lam.n
        return [fam.H(l) for l in fam.levels(max(top, -1))]
    s = fam.kappa.size
    return [fam.P(l) for l in range(lo + s, hi - s + 1)]


def span_vs_quasi(fam, window=None):
    """(equal, defect, details): span of family members vs the quasi-invariant space."""
    need = required_window(fam)
    if window is None:
        window = (0, need + 2) if is_hermite(fam) else (-need, need)
    reach = window[1] if is_hermite(fam) else min(-window[0], window[1])
    if reach < need:
        raise WindowTooSmallError(f"window must reach {need}", need)
    qb = quasi_basis(fam, ALL, window)
    members = family_members(fam, window)
    lo, hi = window
    vecs = []
    for p in members:
        if isinstance(p, Poly):
            vecs.append([p[j] for j in range(lo, hi + 1)])
        else:
            vecs.append([p[j] for j in range(lo, hi + 1)])
    span_dim = _exact_rank(vecs) if vecs else 0
    inside = all(quasi_invariant_everywhere(p, fam, ALL) for p in members)
    defect = qb.dim - span_dim
    details = {"quasi_dim": qb.dim, "span_dim": span_dim, "members": len(members),
               "members_quasi_invariant": inside, "rank_status": qb.status,
               "rank_gap": qb.rank.gap}
    return defect == 0 and inside, defect, details


def codim_real(fam: HermiteFamily, window=None) -> int:
    """|lambda| minus the real multiplicities, cross-checked against quasi_basis dimensions."""
    rs = family_roots(fam)
    real_mult = sum(e.mult for e in rs.of_class(REAL)) if rs else 0
    formula = fam.lam.size - real_mult
    if window is None:
        window = (0, max(8, 2 * fam.lam.size + 2))
    q_all = quasi_basis(fam, ALL, window)
    q_real = quasi_basis(fam, REAL, window)
    if UNDECIDED in (q_all.status, q_real.status):
        raise CodimMismatchError("rank undecided in the codimension cross-check")
    if q_real.dim - q_all.dim != formula:
        raise CodimMismatchError(
            f"codimension {q_real.dim - q_all.dim} from subspaces, {formula} from roots")
    return formula


def local_residue(p, q, fam, entry: RootEntry):
    """Residue at the root of psi*phi with psi = p E / W, phi = q E / W (z- or x-variable)."""
    from .quadrature import residue_from_series
    with mp.workdps(local_dps()):
        mu = entry.mult
        order = 2 * mu
        den = denom_series(fam, entry.center, mu + order)
        tail = _split_vanishing(den, mu)
        tail2 = series_mul(tail, tail, order)
        z0 = entry.center
        if is_hermite(fam):
            num = series_mul(series_mul(taylor_z(p, z0, order), taylor_z(q, z0, order), order),
                             taylor_gaussian(z0, order, mpmath.mpf(1)), order)
        else:
            num = series_mul(taylor_exp_phase(p, z0, order), taylor_exp_phase(q, z0, order), order)
        res = residue_from_series(num, tail2, order)
        inv_abs = [abs(c) for c in series_inv(tail2, order)]
        if is_hermite(fam):
            mag = series_mul(magnitude_series(fam, p, z0, order, mpmath.mpf(1) / 2),
                             magnitude_series(fam, q, z0, order, mpmath.mpf(1) / 2), order)
        else:
            mag = series_mul(magnitude_series(fam, p, z0, order), magnitude_series(fam, q, z0, order), order)
        scale = abs(series_mul(mag, inv_abs, order)[order - 1])
        return res, scale


def residue_product_check(p, q, fam, entry: RootEntry, tol: float = QUASI_TOL) -> bool:
    """Res(psi phi) at the root vanishes (relative to the size of the terms)."""
    res, scale = local_residue(p, q, fam, entry)
    return abs(res) <= tol * max(scale, mpmath.mpf(10) ** -40)
