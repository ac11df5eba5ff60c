from fractions import Fraction

from xopoly.exactalg import GaussianRational as GQ
from xopoly.fixtures import (EXPECTED_HERMITE_CONSTANT, EXPECTED_LAURENT_CONSTANT, hermite_fixture_report,
                             laurent_fixture_report, regularity_pattern)


def test_hermite_table_constant():
    rep = hermite_fixture_report()
    assert rep.consistent
    assert rep.constant == GQ(EXPECTED_HERMITE_CONSTANT) == GQ(Fraction(1, 2))
    assert rep.passed()


def test_hermite_table_flags_sign_misprint():
    rep = hermite_fixture_report()
    assert [m["l"] for m in rep.misprints] == [6]
    assert rep.misprints[0]["ratio"] == str(GQ(Fraction(-1, 2)))


def test_laurent_table_constant_and_misprint():
    rep = laurent_fixture_report()
    assert rep.constant == GQ(EXPECTED_LAURENT_CONSTANT)
    assert rep.passed()
    assert [m["l"] for m in rep.misprints] == [2]


def test_laurent_table_independent_of_a():
    for a in (GQ(1, 1), GQ(Fraction(1, 3), -2), GQ.unimodular(2, 1)):
        assert laurent_fixture_report(a).constant == GQ(-1)


def test_regularity_pattern():
    out = regularity_pattern(14)
    assert out["passed"] and out["mismatches"] == []
    assert [r["l"] for r in out["rows"] if r["regular"]] == [3, 5, 7, 9, 11, 13]


def test_report_serialises():
    js = hermite_fixture_report().to_json()
    assert js["constant"] == "1/2" and js["passed"] is True
