import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from xopoly.exactalg import (GaussianRational as GQ, LaurentPoly, Poly, count_real_roots, d_wronskian,
                             det_bareiss, det_leibniz, diff, exact_div, logd_op, poly_det, poly_divmod,
                             poly_gcd, squarefree_decompose, wronskian)
from xopoly.laurent import phi

Z = Poly([0, 1])

small = st.integers(-6, 6)
gq = st.builds(GQ, small, small)
polys = st.lists(gq, min_size=1, max_size=5).map(Poly)
nz_polys = polys.filter(lambda p: not p.is_zero())
laurents = st.builds(LaurentPoly, st.lists(gq, min_size=1, max_size=4), st.integers(-3, 3))


# -- Gaussian rationals ------------------------------------------------------------

def test_gq_field_ops():
    a, b = GQ(1, 2), GQ(Fraction(1, 3), -1)
    assert (a * b) / b == a
    assert a * a.inverse() == GQ(1)
    assert (a + b) - b == a
    assert GQ(0, 1) ** 2 == GQ(-1)
    assert GQ(3, 4).norm() == 25
    assert GQ.unimodular(2, 1).norm() == 1


def test_gq_inverse_of_zero_rejected():
    with pytest.raises(ZeroDivisionError):
        GQ(0).inverse()


@given(gq, gq)
def test_gq_json_roundtrip(a, b):
    x = a / GQ(7, 3) + b
    assert GQ.from_json(x.to_json()) == x


# -- polynomials ---------------------------------------------------------------------

def test_diff_examples():
    assert diff(Z * Z) == Poly([0, 2])
    assert diff(Poly([5])).is_zero()
    assert diff(Poly([-2, 0, 4])) == Poly([0, 8])


@given(polys, polys)
def test_leibniz_rule(p, q):
    assert diff(p * q) == diff(p) * q + p * diff(q)


@given(polys, nz_polys)
def test_divmod_reconstructs(a, b):
    q, r = poly_divmod(a, b)
    assert q * b + r == a
    assert r.is_zero() or r.degree < b.degree


@given(nz_polys, nz_polys)
def test_gcd_divides_both(a, b):
    g = poly_gcd(a, b)
    assert poly_divmod(a, g)[1].is_zero()
    assert poly_divmod(b, g)[1].is_zero()


@given(polys)
def test_poly_json_roundtrip(p):
    assert Poly.from_json(json.loads(json.dumps(p.to_json()))) == p


@given(laurents)
def test_laurent_json_roundtrip(p):
    assert LaurentPoly.from_json(json.loads(json.dumps(p.to_json()))) == p


def test_canonical_encoding_shape():
    enc = LaurentPoly([GQ(Fraction(1, 2), -3)], -2).to_json()
    assert enc == {"lo": -2, "coeffs": [[1, 2, -3, 1]]}


# -- determinants and Wronskians -------------------------------------------------------

@settings(max_examples=40)
@given(st.lists(st.lists(gq, min_size=3, max_size=3), min_size=3, max_size=3))
def test_bareiss_matches_leibniz_scalars(m):
    got = det_bareiss(m, lambda a, b: a / b, GQ(1), lambda x: not x)
    assert got == det_leibniz(m, GQ(0))


@settings(max_examples=25)
@given(st.lists(st.lists(polys, min_size=3, max_size=3), min_size=3, max_size=3))
def test_bareiss_matches_leibniz_polys(m):
    assert poly_det(m) == det_leibniz(m, Poly())


def test_wronskian_examples():
    p = Poly([1, 2, 3])
    assert wronskian([p]) == p
    assert wronskian([Poly([1]), Poly([0, 2])]) == Poly([2])
    assert wronskian([Z, Z * Z]) == Z * Z
    assert wronskian([]) == Poly([1])


@settings(max_examples=40)
@given(polys, polys, gq)
def test_wronskian_scaling_and_alternation(f, g, c):
    w = wronskian([f, g])
    assert wronskian([f * Poly([c]), g]) == w * Poly([c])
    assert wronskian([g, f]) == -w
    assert wronskian([f, f]).is_zero()


@settings(max_examples=30)
@given(polys, polys, polys)
def test_wronskian_multilinear(f, g, h):
    assert wronskian([f + h, g]) == wronskian([f, g]) + wronskian([h, g])


def test_logd_examples():
    assert logd_op(LaurentPoly.monomial(3)) == LaurentPoly.monomial(3, 3)
    assert logd_op(LaurentPoly.monomial(-1)) == LaurentPoly.monomial(-1, -1)
    a = GQ(2, 1)
    assert logd_op(phi(1, a)) == LaurentPoly.from_dict({1: a, -1: -a.inverse()})


def test_d_wronskian_examples():
    P = LaurentPoly.from_dict({-2: GQ(1), 3: GQ(0, 1)})
    assert d_wronskian([P]) == P
    assert d_wronskian([phi(1, 1)]) == LaurentPoly.from_dict({1: GQ(1), -1: GQ(1)})
    a, b = GQ(2, 1), GQ(1, -3)
    f, g = phi(1, a), phi(2, b)
    assert d_wronskian([f, g]) == f * logd_op(g) - g * logd_op(f)


@given(laurents, laurents)
def test_logd_leibniz(p, q):
    assert logd_op(p * q) == logd_op(p) * q + p * logd_op(q)


@given(laurents)
def test_dagger_is_an_involution(p):
    assert p.dagger().dagger() == p


@given(laurents)
def test_dagger_anticommutes_with_D(p):
    assert logd_op(p).dagger() == -logd_op(p.dagger())


# -- square-free decomposition and Sturm ------------------------------------------------

def test_squarefree_examples():
    assert sorted(squarefree_decompose(Z * Z * (Z - 1)), key=lambda t: t[1]) == [(Z - 1, 1), (Z, 2)]
    assert squarefree_decompose(Poly([0, 2])) == [(Z, 1)]
    z2p1 = Z * Z + 1
    assert squarefree_decompose(z2p1 * z2p1) == [(z2p1, 2)]


@settings(max_examples=40)
@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(1, 3)), min_size=1, max_size=3, unique_by=lambda t: t[0]))
def test_squarefree_reconstructs(roots):
    p = Poly([3])
    for r, m in roots:
        p = p * (Z - r) ** m
    parts = squarefree_decompose(p)
    rebuilt = Poly([1])
    for f, m in parts:
        assert poly_gcd(f, diff(f)).degree == 0
        rebuilt = rebuilt * f ** m
    assert rebuilt == p.monic()


def test_sturm_counts():
    assert count_real_roots(Poly([-2, 0, 4])) == 2
    assert count_real_roots(Z * Z + 1) == 0
    assert count_real_roots((Z - 1) ** 3 * (Z + 2)) == 2
    assert count_real_roots(Poly([-2, 0, 4]), Fraction(0), None) == 1


def test_exact_div_rejects_remainder():
    with pytest.raises(ArithmeticError):
        exact_div(Z * Z + 1, Z)
