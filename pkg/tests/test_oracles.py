import math

import pytest

from poincare_dyadic.errors import ShapeError, SolverError
from poincare_dyadic.fields import bump, eigenfunction, poly
from poincare_dyadic.geometry import AxisBox, Ball, Domain, decompose, l_shape, unit_square
from poincare_dyadic.oracles import (conjugate_gradient, convex_p1_constant, convex_pp_constant,
                                     convex_pp_report, dirichlet_lambda1,
                                     discrete_interval_eigenvalue, pi_p, rayleigh_ratio)
from poincare_dyadic.quadrature import NormSpec, global_norms

INTERVAL = Domain(AxisBox((0,), (1,)))
SQUARE = Domain(unit_square())
BIG_SQUARE = Domain(AxisBox((-1, -1), (1, 1)))
LSHAPE_BENCHMARK = 9.6397238


def test_convex_p1():
    assert convex_p1_constant(SQUARE) == pytest.approx(math.sqrt(2) / 2)
    assert convex_p1_constant(SQUARE) == pytest.approx(0.70711, abs=1e-5)
    assert convex_p1_constant(Domain(Ball((0, 0), 1.0))) == 1.0
    with pytest.raises(ShapeError, match="convex"):
        convex_p1_constant(Domain(l_shape()))


def test_pi_p_values():
    assert pi_p(2) == pytest.approx(math.pi, rel=1e-15)
    want4 = 2 * math.pi * 3**0.25 / (4 * math.sin(math.pi / 4))
    assert pi_p(4) == pytest.approx(want4, rel=1e-15)
    assert pi_p(4) == pytest.approx(2.923581, abs=1e-6)
    assert abs(pi_p(1e6) - 2.0) <= 1e-4
    for bad in (1.0, 0.5, -2):
        with pytest.raises(ValueError):
            pi_p(bad)


def test_convex_pp_constant():
    assert convex_pp_constant(2, math.pi) == pytest.approx(1.0, rel=1e-15)
    assert convex_pp_constant(2, math.sqrt(2)) == pytest.approx(math.pi**2 / 2, rel=1e-15)
    assert convex_pp_constant(2, 1.0) == pytest.approx(math.pi**2, rel=1e-15)
    with pytest.raises(ValueError):
        convex_pp_constant(1.5, 1.0)
    rep = convex_pp_report(2, math.sqrt(2))
    assert rep.alt_value == pytest.approx(math.sqrt(2) / math.pi)


def test_interval_eigenvalue_grid512():
    rep = dirichlet_lambda1(INTERVAL, 512)
    assert abs(rep.lambda1 - math.pi**2) / math.pi**2 <= 0.005
    assert rep.lambda1 == pytest.approx(discrete_interval_eigenvalue(512), rel=1e-10)
    assert rep.residual <= 1e-8
    assert rep.value == pytest.approx(1 / rep.lambda1)
    assert rep.alt_value == pytest.approx(rep.lambda1**-0.5)


def test_interval_second_order_convergence():
    e128 = abs(dirichlet_lambda1(INTERVAL, 128).lambda1 - math.pi**2)
    e256 = abs(dirichlet_lambda1(INTERVAL, 256).lambda1 - math.pi**2)
    assert 3.5 <= e128 / e256 <= 4.5


def test_square_eigenvalue_grid128():
    rep = dirichlet_lambda1(SQUARE, 128)
    assert abs(rep.lambda1 - 2 * math.pi**2) / (2 * math.pi**2) <= 0.01
    assert rep.lambda1 == pytest.approx(2 * discrete_interval_eigenvalue(128), rel=1e-10)
    assert rep.residual <= 1e-8


def test_classical_lshape_benchmark(classical_lshape):
    lam = {g: dirichlet_lambda1(classical_lshape, g).lambda1 for g in (64, 128, 256)}
    assert abs(lam[256] - LSHAPE_BENCHMARK) / LSHAPE_BENCHMARK <= 0.01
    # three-grid extrapolation with the observed order
    r = (lam[64] - lam[128]) / (lam[128] - lam[256])
    extrapolated = lam[256] - (lam[128] - lam[256]) / (r - 1)
    assert abs(extrapolated - LSHAPE_BENCHMARK) / LSHAPE_BENCHMARK <= 2e-4


def test_lshape_above_square(lshape):
    assert dirichlet_lambda1(lshape, 64).lambda1 > dirichlet_lambda1(SQUARE, 64).lambda1


def test_nongridable_domain():
    with pytest.raises(ShapeError):
        dirichlet_lambda1(Domain(Ball((0, 0), 1.0)), 64)
    with pytest.raises(ValueError):
        dirichlet_lambda1(SQUARE, 4)


def test_nonconvergence_raises():
    with pytest.raises(SolverError) as info:
        dirichlet_lambda1(SQUARE, 64, max_iter=1)
    assert info.value.residual is not None


def test_cg_solves_small_system():
    import numpy as np
    from poincare_dyadic.kernels import laplacian_1d
    m = np.ones(20, dtype=np.uint8)
    b = np.linspace(1, 2, 20)
    x, _ = conjugate_gradient(lambda v: laplacian_1d(v, m, 1.0), b, np.zeros(20))
    np.testing.assert_allclose(laplacian_1d(x, m, 1.0), b, rtol=1e-10)


def test_rayleigh_ratio_square():
    rep = global_norms(eigenfunction(), decompose(SQUARE, 4, min_level=4), NormSpec(2, 4))
    r = rayleigh_ratio(rep)
    assert r == pytest.approx(math.pi * math.sqrt(2), rel=1e-10)
    assert r == pytest.approx(4.44288, abs=1e-5)


def test_rayleigh_ratio_interval():
    rep = global_norms(eigenfunction(dim=1), decompose(INTERVAL, 4, min_level=4), NormSpec(2, 4))
    assert rayleigh_ratio(rep) == pytest.approx(math.pi, rel=1e-10)


def test_bump_ratio_exceeds_bounding_box_eigenvalue():
    disk = Domain(Ball((0, 0), 1.0))
    rep = global_norms(bump(), decompose(disk, 7), NormSpec(2, 4))
    lam_box = dirichlet_lambda1(BIG_SQUARE, 128).lambda1
    assert rayleigh_ratio(rep) ** 2 > lam_box


@pytest.mark.parametrize("domain, field", [
    (SQUARE, eigenfunction()),
    (SQUARE, poly(2)),
    (BIG_SQUARE, bump()),
    (BIG_SQUARE, eigenfunction(AxisBox((-1, -1), (1, 1)))),
], ids=["square-eig", "square-poly", "box-bump", "box-eig"])
def test_variational_bound(domain, field):
    lam = dirichlet_lambda1(domain, 128).lambda1
    rep = global_norms(field, decompose(domain, 6, min_level=6), NormSpec(2, 4))
    assert rayleigh_ratio(rep) ** 2 >= lam * 0.99


def test_rayleigh_ratio_guards():
    from poincare_dyadic.fields import zero
    rep = global_norms(zero(), decompose(SQUARE, 1), NormSpec(2, 4))
    with pytest.raises(ValueError):
        rayleigh_ratio(rep)
    rep1 = global_norms(eigenfunction(), decompose(SQUARE, 1), NormSpec(1, 2))
    with pytest.raises(ValueError):
        rayleigh_ratio(rep1)
