"""Worked-example tables for lambda = (1) and kappa = {1}, compared up to a global constant.

Each table has a polynomial column and an eigenfunction column.  The
eigenfunction column determines the table's constant; rows of the
polynomial column that disagree with it are reported as misprints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .exactalg import GaussianRational, LaurentPoly, Poly
from .hermite import HermiteFamily, Partition, spectrum_table
from .laurent import KappaSet, LaurentFamily

GQ = GaussianRational

EXPECTED_HERMITE_CONSTANT = Fraction(1, 2)
EXPECTED_LAURENT_CONSTANT = -1


def _p(*coeffs) -> Poly:
    return Poly(list(coeffs))


def _scale(p: Poly, c) -> Poly:
    return p * Poly([c])


# lambda = (1): H_{(1),l} column and psi_{(1),l} = (num / z^d) e^{-z^2/2} column
HERMITE_H_COLUMN = {
    0: _p(1),
    2: _scale(_p(2, 0, 4), -1),
    3: _p(0, 0, 0, -16),
    4: _scale(_p(1, 0, 4, 0, -4), 12),
    5: _scale(_p(0, 0, 0, 5, 0, -2), 64),
    6: _scale(_p(3, 0, 18, 0, -36, 0, 8), 40),
}

HERMITE_PSI_COLUMN = {
    0: (_p(1), 1),
    2: (_scale(_p(2, 0, 4), -1), 1),
    3: (_p(0, 0, -16), 0),
    4: (_scale(_p(1, 0, 4, 0, -4), 12), 1),
    5: (_scale(_p(0, 0, 5, 0, -2), 64), 0),
    6: (_scale(_p(3, 0, 18, 0, -36, 0, 8), -40), 1),
}


def laurent_p_column(a: GQ) -> dict:
    ai = a.inverse()
    L = LaurentPoly.from_dict
    return {
        0: L({1: a, -1: -ai}),
        -1: L({0: a * 2}),
        1: L({0: -ai * 2}),
        -2: L({-3: ai, -1: a * 3}),
        2: L({3: a, 1: ai * 3}),
    }


def laurent_phi_numerators(a: GQ) -> dict:
    """Numerators N_l of Phi_l = N_l / (a z + a^{-1} z^{-1}) as printed."""
    ai = a.inverse()
    L = LaurentPoly.from_dict
    return {
        0: L({1: a, -1: -ai}),
        -1: L({0: a * 2}),
        1: L({0: -ai * 2}),
        -2: L({-3: ai, -1: a * 3}),
        2: -L({3: a, 1: ai * 3}),
    }


def _ratio(table, computed) -> Optional[GQ]:
    """c with table = c * computed, or None if not proportional."""
    lead = max(e for e, c in computed.terms()) if isinstance(computed, LaurentPoly) else computed.degree
    c = table[lead] / computed[lead]
    return c if table - computed * c == type(table)() else None


@dataclass
class FixtureReport:
    table: str
    constant: Optional[GQ]
    expected: GQ
    rows: list
    misprints: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return self.constant is not None

    def passed(self) -> bool:
        return self.consistent and self.constant == self.expected

    def to_json(self) -> dict:
        return {"table": self.table, "constant": None if self.constant is None else str(self.constant),
                "expected": str(self.expected), "passed": self.passed(), "rows": self.rows,
                "misprints": self.misprints}


def _summarize(name: str, expected, rows: list) -> FixtureReport:
    eig = {r["eigenfunction_ratio"] for r in rows}
    constant = GQ.coerce(next(iter(eig))) if len(eig) == 1 and None not in eig else None
    mis = []
    for r in rows:
        if constant is not None and r["polynomial_ratio"] != str(constant):
            mis.append({"l": r["l"], "column": "polynomial", "ratio": r["polynomial_ratio"]})
    for r in rows:
        r["eigenfunction_ratio"] = None if r["eigenfunction_ratio"] is None else str(r["eigenfunction_ratio"])
    return FixtureReport(name, constant, GQ.coerce(expected), rows, mis)


def hermite_fixture_report() -> FixtureReport:
    fam = HermiteFamily(Partition((1,)))
    rows = []
    for l, H_tab in HERMITE_H_COLUMN.items():
        H = fam.H(l)
        num, d = HERMITE_PSI_COLUMN[l]
        # psi_table * z recovers the polynomial column (W/2 = z in the printed normalisation)
        implied = num * Poly.monomial(1 - d)
        c_h = _ratio(H_tab, H)
        c_psi = _ratio(implied, H)
        rows.append({"l": l, "polynomial_ratio": None if c_h is None else str(c_h),
                     "eigenfunction_ratio": c_psi})
    return _summarize("lambda=(1)", EXPECTED_HERMITE_CONSTANT, rows)


def laurent_fixture_report(a=GQ(2, 1)) -> FixtureReport:
    a = GQ.coerce(a)
    fam = LaurentFamily(KappaSet((1,)), [a])
    ptab = laurent_p_column(a)
    ntab = laurent_phi_numerators(a)
    rows = []
    for l in sorted(ptab):
        P = fam.P(l)
        c_p = _ratio(ptab[l], P)
        c_phi = _ratio(ntab[l], P)
        rows.append({"l": l, "polynomial_ratio": None if c_p is None else str(c_p),
                     "eigenfunction_ratio": c_phi})
    return _summarize(f"kappa={{1}} a={a}", EXPECTED_LAURENT_CONSTANT, rows)


def regularity_pattern(lmax: int = 12) -> dict:
    """lambda=(1): regular on R iff l is odd and l != 1 (l = 1 is removed)."""
    rows = spectrum_table(Partition((1,)), lmax)
    mismatches = []
    for r in rows:
        l = r["l"]
        if l == 1:
            if not r["removed"]:
                mismatches.append(l)
        elif r["regular"] != (l % 2 == 1):
            mismatches.append(l)
    return {"rows": rows, "mismatches": mismatches, "passed": not mismatches}
