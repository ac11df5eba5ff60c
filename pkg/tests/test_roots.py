import mpmath
import pytest

from xopoly.exactalg import GaussianRational as GQ, LaurentPoly, Poly
from xopoly.hermite import Partition, w_lambda
from xopoly.laurent import phi
from xopoly.roots import (OTHER, REAL, UNIT_CIRCLE, RootSet, complex_roots, contour_radii, dg_order)

Z = Poly([0, 1])


def _sorted(rs):
    return sorted(rs.entries, key=lambda e: (float(e.center.real), float(e.center.imag)))


def test_linear_root():
    rs = complex_roots(Poly([0, 2]))
    (e,) = rs.entries
    assert abs(e.center) < 1e-30 and e.mult == 1 and e.cls == REAL


def test_w2_roots():
    rs = complex_roots(w_lambda(Partition((2,))))
    xs = [e.center.real for e in _sorted(rs)]
    with mpmath.workdps(50):
        s = 1 / mpmath.sqrt(2)
        assert abs(xs[0] + s) < 1e-30 and abs(xs[1] - s) < 1e-30
    assert all(e.cls == REAL and e.mult == 1 for e in rs.entries)


def test_multiple_nonreal_roots():
    p = (Z * Z + 1) ** 2
    rs = complex_roots(p)
    assert sorted(e.mult for e in rs.entries) == [2, 2]
    assert all(e.cls == OTHER for e in rs.entries)
    assert rs.total_multiplicity() == 4


def test_unit_circle_classification():
    a = GQ.unimodular(2, 1)
    rs = complex_roots(phi(1, a), policy="circle")
    assert len(rs.entries) == 2
    assert all(e.cls == UNIT_CIRCLE for e in rs.entries)
    for e in rs.entries:
        assert abs(e.center ** 2 + complex(a.inverse() ** 2)) < 1e-28


def test_off_circle_is_other():
    rs = complex_roots(phi(1, GQ(2)), policy="circle")
    assert all(e.cls == OTHER for e in rs.entries)


@pytest.mark.parametrize("parts", [(1, 1), (2, 2), (3, 3), (2, 2, 1, 1)])
def test_double_partitions_have_no_real_roots(parts):
    rs = complex_roots(w_lambda(Partition(parts)))
    assert not rs.of_class(REAL)


def test_multiplicity_sum_equals_degree():
    p = Z ** 3 * (Z - 1) ** 2 * (Z * Z + 2)
    rs = complex_roots(p)
    assert rs.total_multiplicity() == p.degree == 7


def test_laurent_input_degree():
    P = LaurentPoly.from_dict({-2: GQ(1), 1: GQ(3)})
    rs = complex_roots(P, policy="circle")
    assert rs.total_multiplicity() == 3 and rs.lo == -2


def test_radii_below_precision_and_disjoint():
    p = w_lambda(Partition((3, 1)))
    rs = complex_roots(p, precision=1e-40)
    assert all(e.radius < 1e-40 for e in rs.entries)
    es = rs.entries
    for i in range(len(es)):
        for j in range(i + 1, len(es)):
            assert abs(es[i].center - es[j].center) > es[i].radius + es[j].radius


def test_refinement_keeps_structure():
    p = w_lambda(Partition((2, 1, 1)))
    coarse = complex_roots(p, precision=1e-20)
    fine = complex_roots(p, precision=1e-40)
    key = lambda rs: sorted((e.mult, e.cls) for e in rs.entries)
    assert key(coarse) == key(fine)


def test_zero_polynomial_rejected():
    with pytest.raises(ValueError):
        complex_roots(Poly([3]))


def test_dg_order():
    assert [dg_order(m) for m in (1, 3, 6, 10)] == [1, 2, 3, 4]
    with pytest.raises(ValueError):
        dg_order(2)


def test_contour_radii():
    rs = complex_roots(w_lambda(Partition((1,))))
    assert contour_radii(rs).xi_bound == mpmath.inf
    rs2 = complex_roots(Z * Z + 4)
    r = contour_radii(rs2)
    assert abs(r.xi_bound - 2) < 1e-20 and r.xi_admissible(1) and not r.xi_admissible(3)


def test_rootset_json():
    js = complex_roots(Poly([0, 2])).to_json()
    assert set(js["entries"][0]) == {"re", "im", "radius", "mult", "class"}
