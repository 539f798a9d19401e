from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from poincare_dyadic import _pykernels, kernels

try:
    from poincare_dyadic import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = [_pykernels] + ([_ckernels] if _ckernels is not None else [])
needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def exact_sum(terms):
    return float(sum(Fraction(t) for t in terms))


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
@pytest.mark.parametrize("terms, expected", [
    ([], 0.0),
    ([1.0, 1.0, 1.0, 1.0], 4.0),
    ([1e16, 1.0, -1e16], 1.0),
])
def test_neumaier_examples(impl, terms, expected):
    assert impl.neumaier_sum(np.array(terms, dtype=float)) == expected


def test_naive_sum_fails_where_compensation_does_not():
    assert sum([1e16, 1.0, -1e16]) == 0.0
    assert exact_sum([1e16, 1.0, -1e16]) == 1.0


@given(st.lists(st.floats(-1e12, 1e12, allow_nan=False), max_size=60))
@settings(max_examples=200, deadline=None)
def test_neumaier_close_to_exact(terms):
    got = kernels.neumaier_sum(np.array(terms, dtype=float))
    want = exact_sum(terms)
    scale = max([abs(t) for t in terms], default=0.0)
    assert abs(got - want) <= 4 * np.finfo(float).eps * max(abs(want), 1e-300) + 1e-30 * scale


@needs_ext
@given(st.lists(st.floats(-1e8, 1e8, allow_nan=False), max_size=80))
@settings(max_examples=200, deadline=None)
def test_backends_sum_bitwise_equal(terms):
    a = np.array(terms, dtype=float)
    assert _ckernels.neumaier_sum(a) == _pykernels.neumaier_sum(a)


@needs_ext
@pytest.mark.parametrize("exponent", [1.0, 2.0, 3.0, 4.5])
def test_backends_weighted_powers_agree(rng, exponent):
    v = rng.normal(size=(50, 64))
    w = rng.random(64)
    a = _ckernels.weighted_power_rows(v, w, exponent)
    b = _pykernels.weighted_power_rows(v, w, exponent)
    np.testing.assert_allclose(a, b, rtol=1e-13)


@needs_ext
def test_backends_stencils_agree(rng):
    mask = rng.random((17, 23)) > 0.3
    u = rng.normal(size=mask.shape)
    np.testing.assert_allclose(_ckernels.laplacian_2d(u, mask.astype(np.uint8), 3.0, 5.0),
                               _pykernels.laplacian_2d(u, mask, 3.0, 5.0), rtol=1e-14, atol=1e-14)
    m1 = rng.random(31) > 0.2
    u1 = rng.normal(size=31)
    np.testing.assert_allclose(_ckernels.laplacian_1d(u1, m1.astype(np.uint8), 7.0),
                               _pykernels.laplacian_1d(u1, m1, 7.0), rtol=1e-14, atol=1e-14)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_stencil_matches_dense_matrix(impl):
    n = 6
    mask = np.ones(n, dtype=np.uint8)
    dense = 2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        np.testing.assert_array_equal(impl.laplacian_1d(e, mask, 1.0), dense[:, i])


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")
