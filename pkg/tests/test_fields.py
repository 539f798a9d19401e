import math

import numpy as np
import pytest
import sympy as sp

from poincare_dyadic.errors import GradientCheckError, ShapeError
from poincare_dyadic.fields import (FIELD_IDS, analytic_norm, bump, catalog, eigenfunction,
                                    get_field, gradient_check, poly, reciprocal, scaled, zero)
from poincare_dyadic.geometry import AxisBox, Domain, unit_square

x, y = sp.symbols("x y", real=True)
UNIT1 = AxisBox((0,), (1,))
UNIT2 = AxisBox((0, 0), (1, 1))


def test_catalog_contents():
    ids2 = [f.id for f in catalog(2)]
    ids1 = [f.id for f in catalog(1)]
    assert ids2 == ["eigenfunction", "bump", "poly"]
    assert set(ids1) == {"eigenfunction", "bump", "reciprocal", "poly"}
    assert set(FIELD_IDS) >= set(ids1)


def test_point_values():
    assert eigenfunction(dim=1).eval(np.array([[0.5]]))[0] == pytest.approx(1.0, abs=1e-15)
    assert bump().eval(np.zeros((1, 2)))[0] == pytest.approx(math.exp(-1))
    assert reciprocal().eval(np.array([[0.5]]))[0] == 2.0
    assert poly(2).eval(np.array([[0.5, 0.5]]))[0] == 0.0625


def test_bump_vanishes_at_boundary():
    pts = np.array([[1 - 1e-12, 0.0], [0.0, -(1 - 1e-12)], [2.0, 0.0]])
    assert (np.abs(bump().eval(pts)) <= 1e-10).all()
    assert (np.abs(bump().grad(pts)) <= 1e-10).all()


def test_analytic_norm_sine_p1():
    want = float(sp.integrate(sp.sin(sp.pi * x), (x, 0, 1)))
    assert want == pytest.approx(2 / math.pi)
    assert analytic_norm(eigenfunction(dim=1), 1, UNIT1) == pytest.approx(want, rel=1e-14)


def test_analytic_norm_sine_square_p2():
    sq = sp.integrate(sp.integrate((sp.sin(sp.pi * x) * sp.sin(sp.pi * y)) ** 2, (x, 0, 1)), (y, 0, 1))
    assert analytic_norm(eigenfunction(), 2, UNIT2) == pytest.approx(float(sp.sqrt(sq)), rel=1e-14)
    assert float(sp.sqrt(sq)) == 0.5


def test_analytic_norm_sine_square_p4():
    s4 = sp.integrate(sp.sin(sp.pi * x) ** 4, (x, 0, 1)) ** 2
    assert s4 == sp.Rational(9, 64)
    assert analytic_norm(eigenfunction(), 4, UNIT2) == pytest.approx(float(s4) ** 0.25, rel=1e-14)


def test_analytic_gradient_norm_square():
    u = sp.sin(sp.pi * x) * sp.sin(sp.pi * y)
    g2 = sp.integrate(sp.integrate(sp.diff(u, x) ** 2 + sp.diff(u, y) ** 2, (x, 0, 1)), (y, 0, 1))
    assert sp.simplify(g2 - sp.pi**2 / 2) == 0
    assert analytic_norm(eigenfunction(), 2, UNIT2, "gradient") ** 2 == pytest.approx(math.pi**2 / 2,
                                                                                    rel=1e-14)


def test_analytic_norm_poly():
    p = 3
    want = sp.integrate(sp.integrate((x * (1 - x) * y * (1 - y)) ** p, (x, 0, 1)), (y, 0, 1))
    assert analytic_norm(poly(2), p, UNIT2) == pytest.approx(float(want) ** (1 / p), rel=1e-13)


@pytest.mark.parametrize("k", [2, 3, 10, 1000])
def test_reciprocal_norm_is_log_k(k):
    assert analytic_norm(reciprocal(), 1, AxisBox((1 / k,), (1,))) == pytest.approx(math.log(k),
                                                                                   rel=1e-14)
    assert analytic_norm(reciprocal(), 1, AxisBox((0.5,), (1,))) == pytest.approx(0.69315, abs=1e-5)


def test_reciprocal_p2_against_sympy():
    want = float(sp.sqrt(sp.integrate(1 / x**2, (x, sp.Rational(1, 4), 1))))
    assert analytic_norm(reciprocal(), 2, AxisBox((0.25,), (1,))) == pytest.approx(want, rel=1e-14)


def test_unknown_entries_are_none():
    assert analytic_norm(bump(), 2, AxisBox((-1, -1), (1, 1))) is None
    assert analytic_norm(eigenfunction(), 2, AxisBox((0, 0), (0.5, 1))) is None
    assert analytic_norm(eigenfunction(), 3, UNIT2, "gradient") is None


def test_analytic_norm_accepts_box_domains():
    assert analytic_norm(eigenfunction(), 2, Domain(unit_square())) == pytest.approx(0.5)
    from poincare_dyadic.geometry import l_shape
    assert analytic_norm(eigenfunction(), 2, Domain(l_shape())) is None


def test_eigenfunction_rayleigh_quotient_on_square():
    u = analytic_norm(eigenfunction(), 2, UNIT2) ** 2
    g = analytic_norm(eigenfunction(), 2, UNIT2, "gradient") ** 2
    assert g / u == pytest.approx(2 * math.pi**2, rel=1e-14)


@pytest.mark.parametrize("field", [eigenfunction(dim=1), eigenfunction(dim=2), eigenfunction(dim=3),
                                   bump(2), bump(3), poly(1), poly(2), poly(3)],
                         ids=lambda f: f"{f.id}-{f.dim}d")
def test_gradient_check_smooth(field):
    rep = gradient_check(field, trials=100, seed=7)
    assert rep.checked > 30
    assert rep.max_rel_error <= 1e-6
    assert rep.passed


def test_gradient_check_eigenfunction_square_example():
    rep = gradient_check(eigenfunction(), trials=100, seed=0)
    assert rep.checked == 100 and rep.max_rel_error <= 1e-6


def test_gradient_check_zero_field_exact():
    rep = gradient_check(zero(), trials=20, seed=1)
    assert rep.max_rel_error == 0.0


def test_gradient_check_guard_excludes_singular_sample():
    rep = gradient_check(reciprocal(), points=[[1e-9], [0.5]])
    assert rep.skipped == 1 and rep.checked == 1
    assert rep.passed


def test_gradient_check_reciprocal_random():
    assert gradient_check(reciprocal(), trials=200, seed=3).passed


def test_gradient_check_flags_wrong_gradient():
    f = eigenfunction()
    bad = type(f)(f.id, f.dim, f.eval, lambda p: 1.01 * f.grad(p), f.region)
    rep = gradient_check(bad, trials=50, seed=0)
    assert not rep.passed
    with pytest.raises(GradientCheckError):
        gradient_check(bad, trials=50, seed=0, raise_on_fail=True)


def test_scaled_field_norms():
    f = scaled(eigenfunction(), 3.0)
    assert analytic_norm(f, 2, UNIT2) == pytest.approx(1.5)
    pts = np.random.default_rng(0).random((5, 2))
    np.testing.assert_allclose(f.eval(pts), 3 * eigenfunction().eval(pts))


def test_get_field():
    assert get_field("bump", 3).dim == 3
    with pytest.raises(ShapeError):
        get_field("reciprocal", 2)
    with pytest.raises(KeyError):
        get_field("nope")


def test_fields_are_pure(rng):
    pts = rng.random((10, 2))
    for f in catalog(2):
        np.testing.assert_array_equal(f.eval(pts), f.eval(pts.copy()))
