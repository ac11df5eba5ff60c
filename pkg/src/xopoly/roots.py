"""Certified complex roots with exact multiplicities.

Multiplicities come from the exact square-free decomposition; numerics only
locate roots.  Each square-free factor is solved with Durand-Kerner
(``mpmath.polyroots``), polished by Newton steps and enclosed in a disk of
radius ``d |f(z)| / |f'(z)|`` (plus an evaluation-error term), which is
guaranteed to contain a root of the degree-``d`` factor.  Pairwise disjoint
disks then hold exactly one root each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath
from mpmath import mp

from .exactalg import LaurentPoly, Poly, count_real_roots, exact_div, poly_gcd, squarefree_decompose
from .numerics import horner, mp_coeffs, working_dps

REAL = "REAL"
UNIT_CIRCLE = "UNIT_CIRCLE"
OTHER = "OTHER"
UNDECIDED = "UNDECIDED"


class RootIsolationError(RuntimeError):
    def __init__(self, msg: str, achieved_radius=None):
        super().__init__(msg)
        self.achieved_radius = achieved_radius


@dataclass
class RootEntry:
    center: mpmath.mpc
    radius: mpmath.mpf
    mult: int
    cls: str
    factor: int  # index into RootSet.factors

    @property
    def dg_order(self) -> int:
        """The integer m with mult = m(m+1)/2 (local trivial-monodromy order)."""
        return dg_order(self.mult)


@dataclass
class RootSet:
    entries: list
    factors: list  # [(square-free Poly, multiplicity)]
    source: Poly
    lo: int = 0  # source = z**(-lo) * (Laurent input); 0 for ordinary polynomials
    policy: str = "real"
    precision: float = 1e-30

    @property
    def degree(self) -> int:
        return self.source.degree

    def total_multiplicity(self) -> int:
        return sum(e.mult for e in self.entries)

    def of_class(self, *classes: str) -> list:
        return [e for e in self.entries if e.cls in classes]

    def to_json(self) -> dict:
        return {"entries": [
            {"re": mpmath.nstr(e.center.real, 30), "im": mpmath.nstr(e.center.imag, 30),
             "radius": mpmath.nstr(e.radius, 5), "mult": e.mult, "class": e.cls}
            for e in self.entries]}


def dg_order(mult: int) -> int:
    m = (math.isqrt(8 * mult + 1) - 1) // 2
    if m * (m + 1) // 2 != mult:
        raise ValueError(f"root multiplicity {mult} is not a triangular number")
    return m


def _mpf_to_fraction(x) -> Fraction:
    man, exp = mpmath.mpf(x).man_exp
    return Fraction(man) * Fraction(2) ** exp


def _isolate_factor(f: Poly, dps: int):
    """Return [(center, radius)] for the square-free factor f at ``dps`` digits."""
    d = f.degree
    with mp.workdps(dps):
        cs = mp_coeffs(f)
        if d == 1:
            z = -cs[0] / cs[1]
            return [(mpmath.mpc(z), mpmath.mpf(2) ** (-mp.prec + 4) * (1 + abs(z)))]
        try:
            roots = mpmath.polyroots(list(reversed(cs)), maxsteps=400, extraprec=4 * dps)
        except mpmath.libmp.NoConvergence:
            roots = mpmath.polyroots(list(reversed(cs)), maxsteps=4000, extraprec=8 * dps,
                                     error=False)
        dcs = [c * j for j, c in enumerate(cs)][1:]
        absc = [abs(c) for c in cs]
        eps = mpmath.mpf(2) ** (-mp.prec + 2)
        out = []
        for z in roots:
            z = mpmath.mpc(z)
            for _ in range(6):
                fz = horner(cs, z)
                dz = horner(dcs, z)
                if dz == 0:
                    break
                step = fz / dz
                z = z - step
                if abs(step) <= eps * (1 + abs(z)):
                    break
            fz = horner(cs, z)
            dz = horner(dcs, z)
            bound = horner(absc, abs(z)).real * eps * (d + 1)
            if dz == 0:
                r = mpmath.inf
            else:
                r = d * (abs(fz) + bound) / abs(dz)
            out.append((z, max(r, eps * (1 + abs(z)))))
        return out


def _disjoint(balls) -> bool:
    for i in range(len(balls)):
        for j in range(i + 1, len(balls)):
            (c1, r1), (c2, r2) = balls[i], balls[j]
            if abs(c1 - c2) <= r1 + r2:
                return False
    return True


def _refine_factors(sqf, policy: str):
    """Split each square-free factor f into gcd(f, f*) and the cofactor.

    f* is the Schwarz conjugate (policy ``real``) or the reciprocal conjugate
    ``z**deg * conj(f(1/conj z))`` (policy ``circle``).  All real / unit-circle
    roots of f lie in the gcd part; the cofactor has none.
    """
    out = []
    split = []
    for f, m in sqf:
        # the root z = 0 is kept as its own exact linear factor
        if f.degree > 1 and not f.coeffs[0]:
            split.append((Poly([0, 1]), m))
            split.append((exact_div(f, Poly([0, 1])), m))
        else:
            split.append((f, m))
    for f, m in split:
        if policy == "circle":
            fstar = Poly([c.conjugate() for c in reversed(f.coeffs)])
        else:
            fstar = f.conj()
        g = poly_gcd(f, fstar)
        if g.degree >= 1:
            out.append((g, m, True))
        h = exact_div(f, g) if g.degree >= 1 else f
        if h.degree >= 1:
            out.append((h.monic(), m, False))
    return out


def complex_roots(p: Poly | LaurentPoly, precision: float = 1e-30, policy: str = "real",
                  max_escalations: int = 2) -> RootSet:
    """Isolate all roots of ``p`` (Laurent input: roots of ``z**(-lo) p``) and classify them."""
    lo = 0
    if isinstance(p, LaurentPoly):
        lo = p.lo
        src = p.numerator()
    else:
        src = p
    if src.is_zero() or src.degree < 1:
        raise ValueError("complex_roots needs a polynomial of degree >= 1")
    if policy not in ("real", "circle"):
        raise ValueError(f"unknown realness policy {policy!r}")
    factors = _refine_factors(squarefree_decompose(src), policy)
    digits = max(working_dps(), int(-math.log10(precision)) + 15)
    last_r = None
    for attempt in range(max_escalations + 1):
        dps = digits + 4 * attempt * 10
        all_balls = []
        entries = []
        for idx, (f, m, _) in enumerate(factors):
            for c, r in _isolate_factor(f, dps):
                all_balls.append((c, r))
                entries.append(RootEntry(c, r, m, OTHER, idx))
        worst = max(e.radius for e in entries)
        last_r = worst
        if worst < precision and _disjoint(all_balls):
            rs = RootSet(entries, [(f, m) for f, m, _ in factors], src, lo, policy, precision)
            rs = classify(rs, policy, _symmetric=[s for _, _, s in factors], _dps=dps)
            if not rs.of_class(UNDECIDED):
                return rs
    raise RootIsolationError(f"root isolation did not reach radius {precision}", last_r)


def classify(rs: RootSet, realness_policy: Optional[str] = None, _symmetric=None,
             _dps: Optional[int] = None) -> RootSet:
    """Assign REAL / UNIT_CIRCLE / OTHER to each ball, exactly where it matters.

    REAL: a Sturm count on the rational polynomial gcd(Re f, Im f) over the
    real segment inside the ball.  UNIT_CIRCLE: the ball lies in a factor
    closed under z -> 1/conj(z) and its image under that map meets no other
    ball of the factor, so the unique root is fixed by the involution.
    """
    policy = realness_policy or rs.policy
    dps = _dps or working_dps()
    if _symmetric is None:
        _symmetric = [None] * len(rs.factors)
    with mp.workdps(dps):
        for e in rs.entries:
            f, _ = rs.factors[e.factor]
            if policy == "real":
                e.cls = _classify_real(e, f)
            else:
                e.cls = _classify_circle(e, f, rs, _symmetric[e.factor])
        if policy == "real":
            for idx, (f, _) in enumerate(rs.factors):
                n_real = sum(1 for e in rs.entries if e.factor == idx and e.cls == REAL)
                if n_real != count_real_roots(f):
                    for e in rs.entries:
                        if e.factor == idx:
                            e.cls = UNDECIDED
    return rs


def _classify_real(e: RootEntry, f: Poly) -> str:
    c, r = e.center, e.radius
    if abs(c.imag) > r:
        return OTHER
    s = mpmath.sqrt(r * r - c.imag * c.imag)
    x = _mpf_to_fraction(c.real)
    s_in = _mpf_to_fraction(s * (1 - mpmath.mpf(2) ** -20))
    s_out = _mpf_to_fraction(s * (1 + mpmath.mpf(2) ** -20))
    if s_in > 0 and count_real_roots(f, x - s_in, x + s_in) >= 1:
        return REAL
    if count_real_roots(f, x - s_out, x + s_out) == 0:
        return OTHER
    return UNDECIDED


def _classify_circle(e: RootEntry, f: Poly, rs: RootSet, symmetric) -> str:
    c, r = e.center, e.radius
    if abs(abs(c) - 1) > r:
        return OTHER
    if symmetric is None:
        fstar = Poly([x.conjugate() for x in reversed(f.coeffs)])
        symmetric = fstar.monic() == f.monic()
    if not symmetric:
        return UNDECIDED
    if abs(c) <= r:
        return UNDECIDED
    # image of the disk B(c, r) under z -> 1/conj(z) is contained in B(1/conj(c), r')
    rho = abs(c)
    img_c = 1 / mpmath.conj(c)
    img_r = r / (rho * (rho - r))
    for other in rs.entries:
        if other is e or other.factor != e.factor:
            continue
        if abs(other.center - img_c) <= other.radius + img_r:
            return UNDECIDED
    return UNIT_CIRCLE


@dataclass
class ContourRadii:
    nu: mpmath.mpf
    xi_bound: mpmath.mpf
    xi_rec: mpmath.mpf
    mu_rec: mpmath.mpf
    forbidden_moduli: list = field(default_factory=list)

    def xi_admissible(self, xi) -> bool:
        return 0 < abs(xi) < self.xi_bound

    def mu_avoids_roots(self, mu, margin=0) -> bool:
        return all(abs(mu - m) > rad + margin for m, rad in self.forbidden_moduli)

    def mu_in_band(self, mu) -> bool:
        return 1 < max(mu, 1 / mu) < self.nu


def contour_radii(rs: RootSet) -> ContourRadii:
    """Admissible shift bound for lines, minimal outer modulus nu and recommended contours."""
    xi_bound = mpmath.inf
    nu = mpmath.inf
    moduli = []
    for e in rs.entries:
        if e.cls == UNDECIDED:
            raise RootIsolationError("classification incomplete")
        if rs.policy == "real" and e.cls != REAL:
            if abs(e.center.imag) <= e.radius:
                raise RootIsolationError("a root straddles the shifted-line family")
            xi_bound = min(xi_bound, abs(e.center.imag) - e.radius)
        mod = abs(e.center)
        moduli.append((mod, e.radius))
        if e.cls != UNIT_CIRCLE and mod - e.radius > 1:
            nu = min(nu, mod - e.radius)
        elif e.cls != UNIT_CIRCLE and mod + e.radius >= 1 and rs.policy == "circle":
            raise RootIsolationError("root modulus too close to 1 to certify")
    xi_rec = xi_bound / 2 if xi_bound != mpmath.inf else mpmath.mpf("0.5")
    mu_rec = mpmath.sqrt(nu) if nu != mpmath.inf else mpmath.mpf(2)
    return ContourRadii(nu, xi_bound, xi_rec, mu_rec, moduli)
