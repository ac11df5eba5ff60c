"""Contour forms, Gram matrices, kernels, minimal extensions and density probes.

Hermite side: the sesquilinear product on a shifted line iξ + R,
    <p, q> = ∫ p(z) q̄(z) e^{-z^2} / W(z)^2 dz.
Laurent side: the bilinear and Hermitian forms on a circle |z| = μ,
    (P, Q)   = (1/2πi) ∮ P Q W^{-2} dz/z,
    <P, Q>_L = (1/2πi) ∮ P Q† (W W†)^{-1} dz/z.
Laurent values are also computed by residues (exact at z = 0, local series at
the certified roots inside the circle) as an independent second route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
from mpmath import mp

from .exactalg import GaussianRational, LaurentPoly, Poly
from .hermite import HermiteFamily
from .laurent import (LaurentFamily, bilinear_norm_prediction, hermitian_norm_prediction,
                      stated_bilinear_prediction, stated_hermitian_prediction)
from .numerics import NumericPoly, as_numeric, series_inv, series_mul, taylor_z, working_dps
from .quadrature import integrate_circle, integrate_line, residue_from_series
from .quasi import (ALL, REAL, UNIT_CIRCLE, DECIDED, UNDECIDED, RankDecision, _exact_rank,
                    decide_rank, family_roots, quasi_basis, quasi_invariant_everywhere)
from .roots import RootSet, complex_roots, contour_radii

GQ = GaussianRational

SHIFTED_LINE = "SHIFTED_LINE"
CIRCLE = "CIRCLE"

HERMITE = "hermite"
BILINEAR = "bilinear"
HERMITIAN = "hermitian"
FORMS = (HERMITE, BILINEAR, HERMITIAN)

QUAD_TOL = 1e-12
COMPARE_TOL = 1e-8


class ContourError(ValueError):
    pass


class DomainError(ValueError):
    pass


class ExtensionError(RuntimeError):
    pass


@dataclass
class ContourSpec:
    kind: str
    xi: Optional[mpmath.mpf] = None
    mu: Optional[mpmath.mpf] = None
    tol: float = QUAD_TOL

    def to_json(self) -> dict:
        out = {"kind": self.kind, "tol": self.tol}
        if self.xi is not None:
            out["xi"] = float(self.xi)
        if self.mu is not None:
            out["mu"] = float(self.mu)
        return out


def _dps() -> int:
    return max(40, working_dps())


def schwarz_conj(p):
    """q̄(z) = conj(q(conj z)): conjugate every coefficient."""
    if isinstance(p, NumericPoly):
        return p.schwarz_conj()
    return p.conj()


# -- Hermite: shifted line ---------------------------------------------------

def _line_geometry(fam: HermiteFamily):
    rs = family_roots(fam)
    if rs is None:
        return mpmath.inf, []
    radii = contour_radii(rs)
    return radii.xi_bound, [(e.center.imag, e.radius) for e in rs.entries]


def hermite_contour(fam: HermiteFamily, xi=None, tol: float = QUAD_TOL) -> ContourSpec:
    """Shifted line obeying 0 < |ξ| < min |Im z_i| over nonreal zeros of W."""
    bound, _ = _line_geometry(fam)
    if xi is None or xi == "auto":
        xi = bound / 2 if bound != mpmath.inf else mpmath.mpf("0.5")
    xi = mpmath.mpf(xi)
    if not 0 < abs(xi) < bound:
        raise ContourError(f"xi={mpmath.nstr(xi, 6)} violates 0 < |xi| < {mpmath.nstr(bound, 6)}")
    return ContourSpec(SHIFTED_LINE, xi=xi, tol=tol)


def _pole_distance(fam, xi):
    _, poles = _line_geometry(fam)
    if not poles:
        return None
    return min(abs(im - xi) - r for im, r in poles)


def hermite_matrix(ps: Sequence, qs: Sequence, fam: HermiteFamily, contour: ContourSpec) -> list:
    """Matrix [<p_i, q_j>] on one shared set of line nodes."""
    with mp.workdps(_dps()):
        left = [as_numeric(p) for p in ps]
        right = [as_numeric(schwarz_conj(as_numeric(q))) for q in qs]
        W = as_numeric(fam.W)

        def fn(z):
            wt = mpmath.exp(-z * z) / W(z) ** 2
            lv = [p(z) for p in left]
            rv = [q(z) * wt for q in right]
            return [a * b for a in lv for b in rv]

        flat = integrate_line(fn, contour.xi, contour.tol, _pole_distance(fam, contour.xi))
        nq = len(right)
        return [flat[i * nq:(i + 1) * nq] for i in range(len(left))]


def hermite_inner(p, q, fam: HermiteFamily, contour: Optional[ContourSpec] = None,
                  tol: float = QUAD_TOL, check_domain: bool = False):
    if contour is None:
        contour = hermite_contour(fam, tol=tol)
    if contour.kind != SHIFTED_LINE:
        raise ContourError("the Hermite product lives on a shifted line")
    if check_domain:
        for f in (p, q):
            if not quasi_invariant_everywhere(f, fam, REAL):
                raise DomainError("argument is not quasi-invariant at the real zeros of W")
    return hermite_matrix([p], [q], fam, contour)[0][0]


def xi_gap(p, q, fam: HermiteFamily, xi1, xi2, tol: float = QUAD_TOL):
    """(<p,q>_{xi1}, <p,q>_{xi2}) on two admissible lines."""
    a = hermite_inner(p, q, fam, hermite_contour(fam, xi1, tol))
    b = hermite_inner(p, q, fam, hermite_contour(fam, xi2, tol))
    return a, b


def xi_independence(p, q, fam: HermiteFamily, xi1, xi2, tol: float = COMPARE_TOL) -> bool:
    a, b = xi_gap(p, q, fam, xi1, xi2)
    return abs(a - b) < tol * max(1, abs(a), abs(b))


# -- Laurent: circle -----------------------------------------------------------

def _laurent_denominator(fam: LaurentFamily, form: str) -> LaurentPoly:
    if form == BILINEAR:
        return fam.W * fam.W
    return fam.W * fam.W.dagger()


def _denominator_roots(fam: LaurentFamily, form: str) -> Optional[RootSet]:
    cache = fam.__dict__.setdefault("_denroots", {})
    if form not in cache:
        D = _laurent_denominator(fam, form)
        cache[form] = None if D.hi == D.lo else complex_roots(D, 1e-30, policy="circle")
    return cache[form]


def _best_log_gap(moduli: Sequence) -> mpmath.mpf:
    logs = sorted(set(mpmath.log(m) for m in moduli))
    if not logs:
        return mpmath.mpf(2)
    cands = [logs[-1] + mpmath.log(2), logs[0] - mpmath.log(2)]
    cands += [(a + b) / 2 for a, b in zip(logs, logs[1:])]

    def dist(c):
        return min(abs(c - x) for x in logs)

    # prefer the outside candidates on ties: values stay O(1) there
    return mpmath.exp(max(cands, key=dist))


def laurent_contour(fam: LaurentFamily, form: str, mu=None, tol: float = QUAD_TOL) -> ContourSpec:
    """Circle C_mu admissible for the form: avoids root moduli (bilinear) or lies in the band 1 < max(mu, 1/mu) < nu (Hermitian)."""
    rs = family_roots(fam)
    if form == HERMITIAN:
        if not fam.unimodular:
            raise ContourError("the Hermitian Laurent form needs |a_k| = 1 exactly")
        if rs is None:
            radii = None
            default = mpmath.mpf(2)
        else:
            radii = contour_radii(rs)
            default = radii.mu_rec
        mu = default if mu is None or mu == "auto" else mpmath.mpf(mu)
        if radii is not None and not (radii.mu_in_band(mu) and radii.mu_avoids_roots(mu)):
            raise ContourError(f"mu={mpmath.nstr(mu, 6)} outside the band 1 < max(mu,1/mu) < nu")
        if radii is None and mu == 1:
            raise ContourError("mu must differ from 1")
        return ContourSpec(CIRCLE, mu=mu, tol=tol)
    moduli = [abs(e.center) for e in rs.entries] if rs else []
    if mu is None or mu == "auto":
        mu = _best_log_gap(moduli)
    mu = mpmath.mpf(mu)
    if mu <= 0:
        raise ContourError("mu must be positive")
    if rs is not None:
        for e in rs.entries:
            if abs(abs(e.center) - mu) <= 2 * e.radius + mpmath.mpf(10) ** -20:
                raise ContourError(f"mu={mpmath.nstr(mu, 6)} hits a root modulus")
    return ContourSpec(CIRCLE, mu=mu, tol=tol)


def _right_factor(q, form: str) -> NumericPoly:
    q = as_numeric(q)
    return q if form == BILINEAR else q.dagger()


def laurent_matrix(ps: Sequence, qs: Sequence, fam: LaurentFamily, form: str,
                   contour: ContourSpec) -> list:
    """Matrix of form values by the uniform rule on the circle."""
    with mp.workdps(_dps()):
        left = [as_numeric(p) for p in ps]
        right = [_right_factor(q, form) for q in qs]
        D = as_numeric(_laurent_denominator(fam, form))

        def fn(z):
            wt = 1 / D(z)
            lv = [p(z) for p in left]
            rv = [q(z) * wt for q in right]
            return [a * b for a in lv for b in rv]

        flat = integrate_circle(fn, contour.mu, contour.tol)
        nq = len(right)
        return [flat[i * nq:(i + 1) * nq] for i in range(len(left))]


def laurent_bilinear(P, Q, fam: LaurentFamily, contour: Optional[ContourSpec] = None,
                     tol: float = QUAD_TOL):
    if contour is None:
        contour = laurent_contour(fam, BILINEAR, tol=tol)
    return laurent_matrix([P], [Q], fam, BILINEAR, contour)[0][0]


def laurent_hermitian(P, Q, fam: LaurentFamily, contour: Optional[ContourSpec] = None,
                      tol: float = QUAD_TOL):
    if contour is None:
        contour = laurent_contour(fam, HERMITIAN, tol=tol)
    elif not fam.unimodular:
        raise ContourError("the Hermitian Laurent form needs |a_k| = 1 exactly")
    return laurent_matrix([P], [Q], fam, HERMITIAN, contour)[0][0]


def _exact_series_inverse(d: Poly, order: int) -> list:
    inv0 = d[0].inverse()
    out = [inv0]
    for k in range(1, order):
        acc = GQ(0)
        for j in range(1, min(k, d.degree) + 1):
            if d[j]:
                acc = acc + d[j] * out[k - j]
        out.append(-(acc * inv0))
    return out


def residue_matrix(ps: Sequence, qs: Sequence, fam: LaurentFamily, form: str,
                   contour: ContourSpec) -> list:
    """Same matrix as laurent_matrix, by residues inside C_mu.

    The pole at 0 is handled by exact coefficient extraction when the inputs
    are exact; the roots of the denominator inside the circle by local series.
    """
    D = _laurent_denominator(fam, form)
    d = D.numerator()
    shift = -D.lo - 1  # integrand = P Q z^shift / d(z)
    exact = all(isinstance(p, (Poly, LaurentPoly)) for p in list(ps) + list(qs))
    if form == HERMITIAN:
        qs_eff = [q.dagger() if isinstance(q, (LaurentPoly, NumericPoly)) else q.to_laurent().dagger()
                  for q in qs]
    else:
        qs_eff = [q.to_laurent() if isinstance(q, Poly) else q for q in qs]
    ps_eff = [p.to_laurent() if isinstance(p, Poly) else p for p in ps]
    out = [[mpmath.mpc(0)] * len(qs_eff) for _ in ps_eff]
    with mp.workdps(max(60, 2 * working_dps())):
        # pole at z = 0
        lows = [p.lo for p in ps_eff]
        lowq = [q.lo for q in qs_eff]
        need = max(0, -(min(lows, default=0) + min(lowq, default=0) + shift))
        if need:
            if exact:
                S = _exact_series_inverse(d, need)
                for i, P in enumerate(ps_eff):
                    for j, Q in enumerate(qs_eff):
                        R = (P * Q).shift(shift)
                        acc = GQ(0)
                        for e, c in R.terms():
                            if e < 0 and -1 - e < need:
                                acc = acc + c * S[-1 - e]
                        out[i][j] += mpmath.mpc(mpmath.mpf(acc.re.numerator) / acc.re.denominator,
                                                mpmath.mpf(acc.im.numerator) / acc.im.denominator)
            else:
                S = series_inv(as_numeric(d).coeffs + [0] * need, need)
                for i, P in enumerate(ps_eff):
                    Pn = as_numeric(P)
                    for j, Q in enumerate(qs_eff):
                        Qn = as_numeric(Q)
                        acc = mpmath.mpc(0)
                        for a, ca in Pn.terms():
                            for b, cb in Qn.terms():
                                e = a + b + shift
                                if e < 0 and -1 - e < need:
                                    acc += ca * cb * S[-1 - e]
                        out[i][j] += acc
        # roots of the denominator inside the circle
        rs = _denominator_roots(fam, form)
        if rs is not None:
            zfac = NumericPoly([1], shift)
            for e in rs.entries:
                if abs(e.center) >= contour.mu:
                    continue
                M = e.mult
                den = taylor_z(as_numeric(d), e.center, 2 * M)
                inv = series_inv(den[M:], M)
                zs = taylor_z(zfac, e.center, M)
                left = [series_mul(series_mul(taylor_z(P, e.center, M), zs, M), inv, M) for P in ps_eff]
                right = [taylor_z(Q, e.center, M) for Q in qs_eff]
                for i, A in enumerate(left):
                    for j, B in enumerate(right):
                        out[i][j] += sum(A[t] * B[M - 1 - t] for t in range(M))
    return out


# -- generic helpers ----------------------------------------------------------

def form_matrix(form: str, ps, qs, fam, contour: ContourSpec) -> list:
    if form == HERMITE:
        return hermite_matrix(ps, qs, fam, contour)
    return laurent_matrix(ps, qs, fam, form, contour)


def default_contour(form: str, fam, tol: float = QUAD_TOL, xi=None, mu=None) -> ContourSpec:
    if form == HERMITE:
        return hermite_contour(fam, xi, tol)
    return laurent_contour(fam, form, mu, tol)


def hermiticity_check(form, p, q, tol: float = COMPARE_TOL) -> bool:
    """|<p,q> - conj <q,p>| below tol times the scale, for a callable form(p, q)."""
    a = form(p, q)
    b = form(q, p)
    return abs(a - mpmath.conj(b)) < tol * max(1, abs(a), abs(b))


# -- Gram reports ---------------------------------------------------------------

def prediction(form: str, fam, j: int, l: int, stated: bool = True):
    """Closed-form value of the pairing of family members j and l."""
    if form == HERMITE:
        if j != l:
            return mpmath.mpf(0)
        c = fam.norm_prediction(l)
        return mpmath.mpf(c.numerator) / c.denominator * mpmath.sqrt(mpmath.pi)
    if form == BILINEAR:
        if j + l != 0:
            return mpmath.mpf(0)
        f = stated_bilinear_prediction if stated else bilinear_norm_prediction
        return mpmath.mpf(f(fam.kappa, l))
    if j != l:
        return mpmath.mpf(0)
    f = stated_hermitian_prediction if stated else hermitian_norm_prediction
    return mpmath.mpf(f(fam.kappa, l))


def family_member(fam, l: int):
    return fam.H(l) if isinstance(fam, HermiteFamily) else fam.P(l)


def window_indices(fam, window) -> list:
    lo, hi = window
    if isinstance(fam, HermiteFamily):
        return [l for l in range(max(lo, 0), hi + 1) if l not in fam.lam.k]
    return list(range(lo, hi + 1))


def _resid(M, pred) -> mpmath.mpf:
    worst = mpmath.mpf(0)
    for row, prow in zip(M, pred):
        for x, y in zip(row, prow):
            worst = max(worst, abs(x - y) / (1 + abs(y)))
    return worst


@dataclass
class GramReport:
    family: str
    form: str
    indices: list
    contour: ContourSpec
    matrix: list
    predicted: list
    residual: mpmath.mpf
    corrected_predicted: list
    corrected_residual: mpmath.mpf
    oracle: Optional[list] = None
    oracle_residual: Optional[mpmath.mpf] = None
    kernel: list = field(default_factory=list)
    kernel_rank: Optional[RankDecision] = None
    members: list = field(default_factory=list, repr=False)
    fam: object = field(default=None, repr=False)

    def passed(self, tol: float = COMPARE_TOL, corrected: bool = False) -> bool:
        r = self.corrected_residual if corrected else self.residual
        ok = r < tol
        if self.oracle_residual is not None:
            ok = ok and self.oracle_residual < tol
        return bool(ok)

    def diagonal_signs(self) -> dict:
        out = {}
        for a, j in enumerate(self.indices):
            b = self._partner(a)
            if b is not None:
                x = self.matrix[a][b]
                out[j] = 0 if abs(x) < COMPARE_TOL * max(1, _vmax(self.matrix)) * 1e-6 else (
                    1 if x.real > 0 else -1)
        return out

    def _partner(self, a):
        j = self.indices[a]
        target = -j if self.form == BILINEAR else j
        return self.indices.index(target) if target in self.indices else None

    def to_json(self) -> dict:
        def enc(M):
            return [[[mpmath.nstr(x.real, 20), mpmath.nstr(x.imag, 20)] for x in row] for row in M]
        out = {"family": self.family, "form": self.form, "indices": self.indices,
               "contour": self.contour.to_json(),
               "matrix": enc(self.matrix), "predicted": enc(self.predicted),
               "residual": mpmath.nstr(self.residual, 6),
               "corrected_predicted": enc(self.corrected_predicted),
               "corrected_residual": mpmath.nstr(self.corrected_residual, 6),
               "kernel_dim": len(self.kernel)}
        if self.oracle is not None:
            out["oracle"] = enc(self.oracle)
            out["oracle_residual"] = mpmath.nstr(self.oracle_residual, 6)
        if self.kernel_rank is not None:
            out["kernel_rank_gap"] = mpmath.nstr(self.kernel_rank.gap, 6)
        return out


def _vmax(M) -> mpmath.mpf:
    return max((abs(x) for row in M for x in row), default=mpmath.mpf(0))


def _floor() -> mpmath.mpf:
    # rows below this fraction of the largest entry are treated as numerically zero
    return mpmath.mpf(10) ** -(mp.dps // 2)


def _equilibrate(G) -> list:
    gmax = _vmax(G) or 1
    scale = []
    for row in G:
        r = max(abs(x) for x in row)
        scale.append(1 / mpmath.sqrt(max(r, gmax * _floor())))
    return [[G[i][j] * scale[i] * scale[j] for j in range(len(G))] for i in range(len(G))]


def gram_kernel(G) -> tuple:
    """Null vectors of a square Gram matrix after symmetric equilibration."""
    if not G:
        return [], RankDecision(0, [], mpmath.inf, DECIDED)
    E = _equilibrate(G)
    A = mpmath.matrix(E)
    U, S, V = mpmath.svd_c(A)
    n = len(G)
    dec = decide_rank([S[i] for i in range(n)])
    gmax = _vmax(G) or 1
    scale = [1 / mpmath.sqrt(max(max(abs(x) for x in row), gmax * _floor())) for row in G]
    null = []
    for i in range(dec.rank, n):
        v = [mpmath.conj(V[i, j]) * scale[j] for j in range(n)]
        nrm = mpmath.sqrt(sum(abs(x) ** 2 for x in v))
        null.append([x / nrm for x in v])
    return null, dec


def gram(form: str, fam, window, tol: float = QUAD_TOL, contour: Optional[ContourSpec] = None,
         oracle: Optional[bool] = None) -> GramReport:
    """All pairings of family members in the index window, with closed-form predictions."""
    if form not in FORMS:
        raise ValueError(f"unknown form {form!r}")
    if isinstance(fam, HermiteFamily) != (form == HERMITE):
        raise ValueError(f"form {form} does not match the family")
    if contour is None:
        contour = default_contour(form, fam, tol)
    idx = window_indices(fam, window)
    members = [family_member(fam, l) for l in idx]
    M = form_matrix(form, members, members, fam, contour)
    with mp.workdps(_dps()):
        pred = [[prediction(form, fam, j, l) for l in idx] for j in idx]
        cpred = [[prediction(form, fam, j, l, stated=False) for l in idx] for j in idx]
    rep = GramReport(family=_label(fam), form=form, indices=idx, contour=contour, matrix=M,
                     predicted=pred, residual=_resid(M, pred), corrected_predicted=cpred,
                     corrected_residual=_resid(M, cpred), members=members, fam=fam)
    if oracle is None:
        oracle = form != HERMITE
    if oracle and form != HERMITE:
        O = residue_matrix(members, members, fam, form, contour)
        rep.oracle = O
        rep.oracle_residual = max((abs(a - b) / (1 + abs(b)) for ra, rb in zip(M, O)
                                   for a, b in zip(ra, rb)), default=mpmath.mpf(0))
    return rep


def _label(fam) -> str:
    if isinstance(fam, HermiteFamily):
        return f"hermite lambda={fam.lam}"
    return f"laurent {fam.label()}"


# -- kernels and minimal extensions ------------------------------------------------

@dataclass
class ExtensionData:
    kernel_dim: int
    codim: int
    kernel_rank: RankDecision
    basis_indices: list
    dual_exponents: list
    pairing: list
    dual_check: list
    dual_residual: mpmath.mpf
    extended_singular_values: list
    extended_ratio: mpmath.mpf

    def passed(self, n: int, tol: float = COMPARE_TOL, ratio: float = 1e-6) -> bool:
        return (self.kernel_dim == n and self.kernel_rank.status == DECIDED
                and self.dual_residual < tol and self.extended_ratio > ratio)

    def to_json(self) -> dict:
        return {"kernel_dim": self.kernel_dim, "codim": self.codim,
                "kernel_rank_gap": mpmath.nstr(self.kernel_rank.gap, 6),
                "basis_indices": self.basis_indices, "dual_exponents": self.dual_exponents,
                "dual_residual": mpmath.nstr(self.dual_residual, 6),
                "extended_ratio": mpmath.nstr(self.extended_ratio, 6)}


def _independent_members(fam: LaurentFamily, idx: Sequence) -> list:
    """Indices whose members are linearly independent (exact, greedy in window order)."""
    chosen, vecs = [], []
    lo = min(fam.P(l).lo for l in idx)
    hi = max(fam.P(l).hi for l in idx)
    for l in idx:
        v = [fam.P(l)[e] for e in range(lo, hi + 1)]
        if _exact_rank(vecs + [v]) > len(vecs):
            vecs.append(v)
            chosen.append(l)
    return chosen


def _dual_candidate(fam: LaurentFamily, form: str, m: int) -> LaurentPoly:
    base = fam.W * fam.W if form == BILINEAR else fam.W * fam.W.dagger()
    return base.shift(m)


def _unit(p: NumericPoly) -> NumericPoly:
    nrm = mpmath.sqrt(sum(abs(c) ** 2 for c in p.coeffs))
    return p.scale(1 / nrm) if nrm else p


def kernel_and_extension(report: GramReport, codim: Optional[int] = None) -> ExtensionData:
    """Kernel of the form on the span of the window members, duals from W^2 z^m (or W W† z^m), and the extended Gram."""
    fam, form = report.fam, report.form
    if form == HERMITE:
        raise ValueError("extensions are built for the Laurent forms")
    contour = report.contour
    basis_idx = _independent_members(fam, report.indices)
    pos = [report.indices.index(l) for l in basis_idx]
    G = [[report.matrix[a][b] for b in pos] for a in pos]
    null, dec = gram_kernel(G)
    with mp.workdps(_dps()):
        members = [as_numeric(fam.P(l)) for l in basis_idx]
        kernel = [_combine(members, v) for v in null]
        # greedy choice of dual candidates with a well conditioned pairing
        lo = min(p.lo for p in members)
        hi = max(p.hi for p in members)
        span = max(abs(lo), abs(hi))
        chosen, cols = [], []
        if kernel:
            cands = list(range(-span, span + 1))
            cand_polys = [_dual_candidate(fam, form, m) for m in cands]
            P = form_matrix(form, kernel, cand_polys, fam, contour)
            pmax = max(abs(x) for row in P for x in row)
            for c, m in enumerate(cands):
                trial = cols + [[P[r][c] for r in range(len(kernel))]]
                T = mpmath.matrix([[col[r] for col in trial] for r in range(len(kernel))])
                s = mpmath.svd_c(T, compute_uv=False)
                sv = [abs(s[i]) for i in range(len(trial))]
                if min(sv) > mpmath.mpf(10) ** -8 * pmax:
                    cols = trial
                    chosen.append(m)
                if len(chosen) == len(kernel):
                    break
            if len(chosen) < len(kernel):
                raise ExtensionError("no dual set gives a nonsingular pairing; enlarge the window")
        A = mpmath.matrix([[col[r] for col in cols] for r in range(len(kernel))]) if kernel else None
        if kernel:
            X = mpmath.inverse(A)
            cand = [as_numeric(_dual_candidate(fam, form, m)) for m in chosen]
            # the Hermitian form is conjugate-linear in its second slot
            cj = mpmath.conj if form == HERMITIAN else (lambda x: x)
            duals = [_combine(cand, [cj(X[i, l]) for i in range(len(cand))]) for l in range(len(kernel))]
            check = form_matrix(form, kernel, duals, fam, contour)
            resid = max(abs(check[j][l] - (1 if j == l else 0))
                        for j in range(len(kernel)) for l in range(len(kernel)))
        else:
            duals, check, resid = [], [], mpmath.mpf(0)
        ext = [_unit(p) for p in members + duals]
        E = form_matrix(form, ext, ext, fam, contour)
        s = mpmath.svd_c(mpmath.matrix(E), compute_uv=False)
        sv = sorted((abs(s[i]) for i in range(len(ext))), reverse=True)
        ratio = sv[-1] / sv[0] if sv and sv[0] else mpmath.mpf(0)
        pairing = [[A[r, c] for c in range(A.cols)] for r in range(A.rows)] if kernel else []
    return ExtensionData(len(kernel), codim if codim is not None else len(kernel), dec, basis_idx,
                         chosen, pairing, check, resid, sv, ratio)


def _combine(polys: Sequence[NumericPoly], coeffs: Sequence) -> NumericPoly:
    acc = NumericPoly([0])
    for p, c in zip(polys, coeffs):
        acc = acc + p.scale(c)
    return acc


# -- density ---------------------------------------------------------------------

@dataclass
class DensityReport:
    full_rank: bool
    rank: RankDecision
    ambient_dim: int
    probes: int

    def to_json(self) -> dict:
        return {"full_rank": self.full_rank, "rank": self.rank.rank, "ambient_dim": self.ambient_dim,
                "probes": self.probes, "rank_gap": mpmath.nstr(self.rank.gap, 6),
                "status": self.rank.status}


def density_report(fam, window=None, tol: float = QUAD_TOL) -> DensityReport:
    """Pairing of the truncated ambient space against the probe family.

    Hermite: ambient Q_{lambda,R}, probes W^2 h_l (normalised Hermite).
    Laurent: ambient Q_{kappa,C}, probes W W† z^l, Hermitian form.
    """
    if isinstance(fam, HermiteFamily):
        if window is None:
            window = (0, max(8, fam.lam.size + 4))
        qb = quasi_basis(fam, REAL, window)
        from .quasi import _hermite_normal, local_dps
        probes = [_hermite_normal(l, local_dps()) for l in range(window[0], window[1] + 1)]
        W = as_numeric(fam.W)
        probes = [_mul(_mul(p, W), W) for p in probes]
        contour = hermite_contour(fam, tol=tol)
        M = hermite_matrix(qb.polys, probes, fam, contour)
    else:
        if window is None:
            n = fam.kappa.k[0] + fam.kappa.size + 2 if fam.kappa.n else 4
            window = (-n, n)
        qb = quasi_basis(fam, UNIT_CIRCLE, window)
        base = fam.W * fam.W.dagger()
        probes = [base.shift(l) for l in range(window[0], window[1] + 1)]
        contour = laurent_contour(fam, HERMITIAN, tol=tol)
        M = laurent_matrix(qb.polys, probes, fam, HERMITIAN, contour)
    if not qb.polys:
        return DensityReport(True, RankDecision(0, [], mpmath.inf, DECIDED), 0, len(probes))
    A = mpmath.matrix([[M[i][j] for i in range(len(qb.polys))] for j in range(len(probes))])
    s = mpmath.svd_c(A, compute_uv=False)
    dec = decide_rank([s[i] for i in range(min(A.rows, A.cols))])
    full = dec.status == DECIDED and dec.rank == len(qb.polys)
    return DensityReport(full, dec, len(qb.polys), len(probes))


def density_check(fam, window=None, tol: float = QUAD_TOL) -> bool:
    rep = density_report(fam, window, tol)
    if rep.rank.status == UNDECIDED:
        return UNDECIDED
    return rep.full_rank


def _mul(p: NumericPoly, q: NumericPoly) -> NumericPoly:
    out = [mpmath.mpc(0)] * (len(p.coeffs) + len(q.coeffs) - 1)
    for i, a in enumerate(p.coeffs):
        for j, b in enumerate(q.coeffs):
            out[i + j] += a * b
    return NumericPoly(out, p.lo + q.lo)
