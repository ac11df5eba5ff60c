"""Exceptional Laurent orthogonal polynomials (ELOPs).

Building blocks ``Phi_k(a; z) = a z^k + a^{-1} z^{-k}``, the D-Wronskian
``W_{kappa,a}`` (``D = z d/dz``), the ELOPs ``P_{kappa,a;l}`` obtained by
appending the column ``z^l``, the dagger involution and the conjugated
operator ``T_kappa``.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import mpmath
from mpmath import mp

from .exactalg import GaussianRational, LaurentPoly, d_wronskian, logd_op
from .numerics import series_inv, series_mul, taylor_exp_phase, working_dps
from .ratfunc import RatFunc
from .roots import RootSet, complex_roots, dg_order

GQ = GaussianRational


class InconsistencyError(RuntimeError):
    pass


@dataclass(frozen=True)
class KappaSet:
    k: tuple

    def __post_init__(self):
        ks = tuple(int(x) for x in self.k)
        if any(x <= 0 for x in ks):
            raise ValueError(f"kappa entries must be positive: {ks}")
        if any(a <= b for a, b in zip(ks, ks[1:])):
            raise ValueError(f"kappa must be strictly decreasing: {ks}")
        object.__setattr__(self, "k", ks)

    @classmethod
    def parse(cls, text: str) -> "KappaSet":
        text = text.strip().strip("{}()")
        if not text:
            return cls(())
        vals = sorted({int(t) for t in text.replace(" ", "").split(",") if t}, reverse=True)
        return cls(tuple(vals))

    @property
    def n(self) -> int:
        return len(self.k)

    @property
    def size(self) -> int:
        return sum(self.k)

    def __str__(self):
        return "{" + ",".join(map(str, self.k)) + "}"


_GQ_RE = re.compile(r"^\s*([+-]?[\d/]+)?\s*(?:([+-])\s*([\d/]*)\s*i)?\s*$")


def parse_gq(text: str) -> GaussianRational:
    """Parse '2', '-3/2', '1+2i', '2-i', 'i', '-1/3i', or 'u(m,n)' = (m+ni)/(m-ni)."""
    t = text.strip().replace(" ", "")
    m = re.fullmatch(r"u\((-?\d+),(-?\d+)\)", t)
    if m:
        return GQ.unimodular(int(m.group(1)), int(m.group(2)))
    if t.endswith("i"):
        body = t[:-1]
        # split at the last sign that is not leading
        pos = max(body.rfind("+"), body.rfind("-"))
        if pos > 0:
            re_part, im_part = body[:pos], body[pos:]
        else:
            re_part, im_part = "0", body
        if im_part in ("", "+"):
            im_part = "1"
        elif im_part == "-":
            im_part = "-1"
        return GQ(Fraction(re_part), Fraction(im_part))
    return GQ(Fraction(t))


def format_gq(x: GaussianRational) -> str:
    if x.im == 0:
        return str(x.re)
    sign = "+" if x.im >= 0 else "-"
    return f"{x.re}{sign}{abs(x.im)}i"


def phi(k: int, a) -> LaurentPoly:
    a = GQ.coerce(a)
    if not a:
        raise ValueError("Phi_k needs a nonzero parameter")
    return LaurentPoly.from_dict({k: a, -k: a.inverse()})


def dagger(p: LaurentPoly) -> LaurentPoly:
    """P^dagger(z) = conj(P(1/conj z))."""
    return p.dagger()


class LaurentFamily:
    """kappa with parameters a; caches the ELOPs (single writer, concurrent readers)."""

    def __init__(self, kappa: KappaSet, a: Sequence):
        a = tuple(GQ.coerce(x) for x in a)
        if len(a) != kappa.n:
            raise ValueError(f"need {kappa.n} parameters, got {len(a)}")
        if any(not x for x in a):
            raise ValueError("parameters a_k must be nonzero")
        self.kappa = kappa
        self.a = a
        self.unimodular = all(x.norm() == 1 for x in a)
        self.W = d_wronskian([phi(k, x) for k, x in zip(kappa.k, a)])
        self._cache: dict = {}
        self._lock = threading.Lock()

    @property
    def n(self) -> int:
        return self.kappa.n

    def P(self, l: int) -> LaurentPoly:
        try:
            return self._cache[l]
        except KeyError:
            pass
        with self._lock:
            if l not in self._cache:
                self._cache[l] = _elop(self.kappa, self.a, l)
            return self._cache[l]

    def label(self) -> str:
        return f"kappa={self.kappa} a=[{', '.join(format_gq(x) for x in self.a)}]"

    def __repr__(self):
        return f"LaurentFamily({self.label()})"


@lru_cache(maxsize=None)
def _elop(kappa: KappaSet, a: tuple, l: int) -> LaurentPoly:
    cols = [phi(k, x) for k, x in zip(kappa.k, a)] + [LaurentPoly.monomial(l)]
    return d_wronskian(cols)


def w_kappa(fam: LaurentFamily) -> LaurentPoly:
    return fam.W


def elop(fam: LaurentFamily, l: int) -> LaurentPoly:
    return fam.P(l)


def kernel_relation_check(fam: LaurentFamily, j: int, a_override=None) -> bool:
    """Exact test of a_j P_{k_j} + a_j^{-1} P_{-k_j} = 0 (j is 1-based).

    ``a_override`` replaces a_j in the first slot only (negative control).
    """
    if not 1 <= j <= fam.n:
        raise ValueError(f"index j={j} outside 1..{fam.n}")
    kj = fam.kappa.k[j - 1]
    aj = fam.a[j - 1]
    first = GQ.coerce(a_override) if a_override is not None else aj
    return (fam.P(kj) * first + fam.P(-kj) * aj.inverse()).is_zero()


def t_kappa_eigencheck(fam: LaurentFamily, l: int):
    """Verify -W D^2P + 2(DW) DP - (D^2W) P = c W P exactly and return (True, c)."""
    W = fam.W
    P = fam.P(l)
    DW = logd_op(W)
    D2W = logd_op(DW)
    DP = logd_op(P)
    D2P = logd_op(DP)
    lhs = -(W * D2P) + DW * DP * 2 - D2W * P
    rhs = W * P
    if rhs.is_zero():
        raise InconsistencyError("P_{kappa,l} vanishes identically")
    c = lhs.coeffs[-1] / rhs.coeffs[-1] if not lhs.is_zero() else GQ(0)
    if not (lhs - rhs * c).is_zero():
        raise InconsistencyError(f"T_kappa has no eigenvalue on P_{{{fam.kappa},{l}}}")
    return True, c


def schrodinger_eigenvalue(fam: LaurentFamily, l: int) -> GaussianRational:
    """Eigenvalue of Phi = P / W under L = -d^2/dx^2 - 2 (log Wr)_xx with z = e^{ix}.

    Since d/dx = i D, L = D^2 + 2 D^2 log W, applied by the quotient rule.
    """
    F = RatFunc(fam.P(l), fam.W)
    Wr = RatFunc(fam.W)
    logder2 = (Wr.D() / Wr).D()
    out = F.D().D() + logder2 * F * 2
    c = out.ratio_constant(F)
    if c is None:
        raise InconsistencyError("Phi_{kappa,l} is not an eigenfunction of L_kappa")
    return c


def conjugation_oracle_constant(fam: LaurentFamily, l: int) -> GaussianRational:
    """T_kappa = -W L W^{-1}, so its constant is minus the Schrodinger eigenvalue."""
    return -schrodinger_eigenvalue(fam, l)


def ldeg(p: LaurentPoly) -> Optional[int]:
    """L-degree: hi if hi > -lo, lo if hi < -lo, None when balanced."""
    if p.is_zero():
        raise ValueError("L-degree of the zero Laurent polynomial")
    if p.hi > -p.lo:
        return p.hi
    if p.hi < -p.lo:
        return p.lo
    return None


def vandermonde_det(alphas: Sequence[int]) -> int:
    """prod_{i<j} (alpha_j - alpha_i), the determinant of [alpha_c^r]."""
    out = 1
    for i in range(len(alphas)):
        for j in range(i + 1, len(alphas)):
            out *= alphas[j] - alphas[i]
    return out


def top_coefficient(fam: LaurentFamily, l: int) -> GaussianRational:
    """Coefficient of z^{l + |kappa|} in P_{kappa,l}."""
    return fam.P(l)[l + fam.kappa.size]


def stated_leading_law(fam: LaurentFamily, l: int) -> int:
    """det V(l, k_1..k_n) * prod k_j, the leading-coefficient law as usually stated."""
    out = vandermonde_det((l,) + fam.kappa.k)
    for k in fam.kappa.k:
        out *= k
    return out


def leading_law(fam: LaurentFamily, l: int) -> GaussianRational:
    """(-1)^n det V(l, k_1..k_n) prod a_j, the top coefficient of the determinant.

    Picking a_j z^{k_j} from every Phi column leaves the Vandermonde matrix
    with columns (k_1, ..., k_n, l); moving l to the front costs (-1)^n.
    """
    out = GQ((-1) ** fam.n * vandermonde_det((l,) + fam.kappa.k))
    for x in fam.a:
        out = out * x
    return out


def bilinear_norm_prediction(kappa: KappaSet, l: int) -> int:
    """prod (k_m^2 - l^2): value of (P_l, P_{-l}) for the complex bilinear form."""
    out = 1
    for k in kappa.k:
        out *= k * k - l * l
    return out


def hermitian_norm_prediction(kappa: KappaSet, l: int) -> int:
    """prod (l^2 - k_m^2): value of <P_l, P_l>_L for unimodular parameters."""
    out = 1
    for k in kappa.k:
        out *= l * l - k * k
    return out


def stated_bilinear_prediction(kappa: KappaSet, l: int) -> int:
    """prod (l^2 - k_m^2), the orthogonality constant as stated for the bilinear form."""
    return hermitian_norm_prediction(kappa, l)


def stated_hermitian_prediction(kappa: KappaSet, l: int) -> int:
    """prod (k_m^2 - l^2), the orthogonality constant as stated for the Hermitian form."""
    return bilinear_norm_prediction(kappa, l)


def potential_x(fam: LaurentFamily) -> tuple:
    """u = -2 (log W)_xx = 2 D^2 log W as (numerator, W^2), both Laurent in z = e^{ix}."""
    W = fam.W
    DW = logd_op(W)
    return (W * logd_op(DW) - DW * DW) * 2, W * W


def laurent_monodromy_check(fam: LaurentFamily, roots: Optional[RootSet] = None,
                            report: Optional[list] = None, tol: float = 1e-20) -> bool:
    """Duistermaat-Grunbaum conditions for u(x) at every zero of W (in t = x - x_j).

    A zero of multiplicity mu = m(m+1)/2 must give a pure double pole with
    c_{-2} = m(m+1) and vanishing odd coefficients c_{-1}, c_1, ..., c_{2m-1}.
    """
    if fam.kappa.n == 0:
        return True
    if roots is None:
        roots = complex_roots(fam.W, policy="circle")
    num, den = potential_x(fam)
    ok = True
    with mp.workdps(max(60, 2 * working_dps())):
        for e in roots.entries:
            mu = e.mult
            try:
                m = dg_order(mu)
            except ValueError:
                m = None
            top = 2 * (m or 1)
            length = 2 * mu + top + 1
            z0 = e.center
            dser = taylor_exp_phase(den, z0, length + 2 * mu)
            nser = taylor_exp_phase(num, z0, length)
            scale = max(abs(c) for c in dser)
            inv = series_inv(dser[2 * mu:2 * mu + length], length)
            prod = series_mul(nser, inv, length)
            coeff = {r: prod[r + 2 * mu] for r in range(-2 * mu, top)}
            size = max(abs(c) for c in prod) or 1
            small = [r for r in range(-2 * mu, -2) if abs(coeff[r]) > tol * size]
            c2 = coeff[-2]
            passed = m is not None and not small and abs(c2 - m * (m + 1)) <= tol * size
            if passed:
                passed = all(abs(coeff[2 * j - 1]) <= tol * size for j in range(m + 1))
            if report is not None:
                report.append({"center": complex(z0), "mult": mu, "m": m,
                               "c_-2": complex(c2), "passed": passed,
                               "scale": float(scale)})
            ok = ok and passed
    return ok
