from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from xopoly.exactalg import GaussianRational as GQ, LaurentPoly, d_wronskian, logd_op
from xopoly.laurent import (KappaSet, LaurentFamily, bilinear_norm_prediction, conjugation_oracle_constant,
                            dagger, format_gq, kernel_relation_check, laurent_monodromy_check, ldeg,
                            leading_law, parse_gq, phi, stated_leading_law, t_kappa_eigencheck,
                            top_coefficient, vandermonde_det)

L = LaurentPoly.from_dict
A = GQ(2, 1)
AI = A.inverse()


def fam(k, a):
    return LaurentFamily(KappaSet(tuple(k)), [GQ.coerce(x) for x in a])


def test_phi_examples():
    assert phi(1, 1) == L({1: GQ(1), -1: GQ(1)})
    assert phi(2, GQ(0, 1)) == L({2: GQ(0, 1), -2: GQ(0, -1)})
    with pytest.raises(ValueError):
        phi(1, 0)


def test_w_kappa_examples():
    assert fam((), []).W == LaurentPoly([1])
    assert fam((1,), [A]).W == L({1: A, -1: AI})
    b = GQ(1, 3)
    f, g = phi(2, A), phi(1, b)
    assert fam((2, 1), [A, b]).W == f * logd_op(g) - g * logd_op(f)


def test_elop_examples():
    F = fam((1,), [A])
    assert F.P(0) == -L({1: A, -1: -AI})
    assert F.P(-1) == L({0: -A * 2})
    assert F.P(1) == L({0: AI * 2})
    for l in range(-3, 4):
        assert fam((), []).P(l) == LaurentPoly.monomial(l)


def test_dagger_examples():
    assert dagger(LaurentPoly.monomial(1)) == LaurentPoly.monomial(-1)
    assert dagger(L({1: GQ(0, 1)})) == L({-1: GQ(0, -1)})


@pytest.mark.parametrize("k,a", [((1,), ["u(2,1)"]), ((2, 1), ["u(2,1)", "u(1,3)"]),
                                 ((3, 2, 1), ["u(2,1)", "u(1,3)", "u(3,2)"])])
def test_wronskian_dagger_symmetry(k, a):
    F = fam(k, [parse_gq(x) for x in a])
    n = len(k)
    assert F.W.dagger() == F.W * ((-1) ** (n * (n - 1) // 2))


def test_kernel_relations():
    F = fam((1,), [A])
    assert (F.P(1) * A + F.P(-1) * AI).is_zero()
    assert kernel_relation_check(F, 1)
    G = fam((2, 1), [A, GQ(1, 3)])
    assert kernel_relation_check(G, 1) and kernel_relation_check(G, 2)
    assert not kernel_relation_check(G, 1, a_override=A * 2)


def test_eigen_examples():
    assert t_kappa_eigencheck(fam((), []), 3) == (True, GQ(-9))
    assert t_kappa_eigencheck(fam((1,), [A]), 0) == (True, GQ(0))
    assert t_kappa_eigencheck(fam((1,), [A]), 2) == (True, GQ(-4))


@pytest.mark.parametrize("k,a", [((1,), [A]), ((2, 1), [A, GQ(1, 3)]), ((3, 1), [GQ(1, 2), GQ(-3, 2)])])
def test_eigen_constant_and_oracle(k, a):
    F = fam(k, a)
    for l in range(-(k[0] + 2), k[0] + 3):
        ok, c = t_kappa_eigencheck(F, l)
        assert ok and c == -l * l
        assert conjugation_oracle_constant(F, l) == c


def test_ldeg_examples():
    F = fam((1,), [A])
    assert ldeg(F.P(2)) == 3
    assert ldeg(F.P(-2)) == -3
    assert ldeg(F.P(1)) is None
    with pytest.raises(ValueError):
        ldeg(LaurentPoly())


def test_vandermonde_examples():
    assert vandermonde_det((0, 1)) == 1
    assert vandermonde_det((2, 2)) == 0
    assert vandermonde_det((0, 2, 1)) == -2


@pytest.mark.parametrize("k,a", [((1,), [A]), ((2, 1), [A, GQ(1, 3)]), ((3, 2, 1), [A, GQ(1, 3), GQ(-1, 1)])])
def test_top_coefficient_law(k, a):
    F = fam(k, a)
    for l in range(-(k[0] + 3), k[0] + 4):
        assert top_coefficient(F, l) == leading_law(F, l)


def test_stated_leading_law_needs_unit_parameters():
    # with a_j = 1 and prod k_j = 1 the two laws agree up to the sign (-1)^n
    F = fam((1,), [1])
    for l in range(-3, 4):
        assert top_coefficient(F, l) == -stated_leading_law(F, l)
    G = fam((2, 1), [A, GQ(1, 3)])
    assert any(top_coefficient(G, l) not in (stated_leading_law(G, l), -stated_leading_law(G, l))
               for l in range(-4, 5))


def test_zero_pairings_at_kappa():
    K = KappaSet((3, 1))
    zeros = [l for l in range(-5, 6) if bilinear_norm_prediction(K, l) == 0]
    assert zeros == [-3, -1, 1, 3]


def test_monodromy_laurent():
    assert laurent_monodromy_check(fam((2, 1), [A, GQ(1, 3)]))
    assert laurent_monodromy_check(fam((3, 1), [GQ.unimodular(1, 1), GQ.unimodular(2, 1)]))


def test_kappa_validation():
    with pytest.raises(ValueError):
        KappaSet((1, 2))
    with pytest.raises(ValueError):
        KappaSet((0,))
    assert KappaSet.parse("{1,3}").k == (3, 1)
    with pytest.raises(ValueError):
        fam((1,), [0])


@pytest.mark.parametrize("text,val", [("2", GQ(2)), ("-3/2", GQ(Fraction(-3, 2))),
                                      ("1+2i", GQ(1, 2)), ("2-i", GQ(2, -1)), ("i", GQ(0, 1)),
                                      ("u(2,1)", GQ.unimodular(2, 1))])
def test_parse_gq(text, val):
    assert parse_gq(text) == val


@given(st.integers(-9, 9), st.integers(-9, 9))
def test_format_parse_roundtrip(re, im):
    x = GQ(re, im) / 7
    assert parse_gq(format_gq(x)) == x


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=4), st.integers(-2, 2))
def test_d_wronskian_of_dagger(cs, lo):
    p = LaurentPoly([GQ(c, 1) for c in cs], lo)
    q = LaurentPoly.monomial(2)
    lhs = d_wronskian([p, q]).dagger()
    rhs = -d_wronskian([p.dagger(), q.dagger()])
    assert lhs == rhs
