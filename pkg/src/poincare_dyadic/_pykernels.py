"""Pure numpy/Python versions of the hot loops in ``_ckernels.pyx``."""

import numpy as np


def neumaier_sum(terms):
    s = 0.0
    c = 0.0
    for x in np.asarray(terms, dtype=np.float64).tolist():
        u = s + x
        if abs(s) >= abs(x):
            c += (s - u) + x
        else:
            c += (x - u) + s
        s = u
    return s + c


def weighted_power_rows(values, weights, exponent):
    v = np.abs(np.asarray(values, dtype=np.float64))
    w = np.asarray(weights, dtype=np.float64)
    if v.shape[-1] != w.shape[0]:
        raise ValueError("weights do not match quadrature axis")
    if exponent == 1.0:
        p = v
    elif exponent == 2.0:
        p = v * v
    else:
        p = v ** exponent
    return np.sum(p * w, axis=1)


def _masked_second_difference(x, axis):
    """2*x - left - right along ``axis`` with zero padding outside the array."""
    pad = [(0, 0)] * x.ndim
    pad[axis] = (1, 1)
    xp = np.pad(x, pad)
    n = x.shape[axis]
    left = np.take(xp, np.arange(0, n), axis=axis)
    right = np.take(xp, np.arange(2, n + 2), axis=axis)
    return 2.0 * x - left - right


def laplacian_1d(u, mask, cx):
    m = np.asarray(mask, dtype=bool)
    x = np.where(m, np.asarray(u, dtype=np.float64), 0.0)
    return np.where(m, cx * _masked_second_difference(x, 0), 0.0)


def laplacian_2d(u, mask, cx, cy):
    m = np.asarray(mask, dtype=bool)
    x = np.where(m, np.asarray(u, dtype=np.float64), 0.0)
    out = cx * _masked_second_difference(x, 0) + cy * _masked_second_difference(x, 1)
    return np.where(m, out, 0.0)
