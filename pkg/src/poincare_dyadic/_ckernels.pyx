# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Semantics mirror ``_pykernels`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow

cnp.import_array()


def neumaier_sum(terms):
    cdef const double[::1] t = np.ascontiguousarray(terms, dtype=np.float64)
    cdef Py_ssize_t i, n = t.shape[0]
    cdef double s = 0.0, c = 0.0, x, u
    for i in range(n):
        x = t[i]
        u = s + x
        if fabs(s) >= fabs(x):
            c += (s - u) + x
        else:
            c += (x - u) + s
        s = u
    return s + c


def weighted_power_rows(values, weights, double exponent):
    cdef const double[:, ::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t m = v.shape[0], q = v.shape[1], i, j
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    cdef double acc, a
    if w.shape[0] != q:
        raise ValueError("weights do not match quadrature axis")
    for i in range(m):
        acc = 0.0
        for j in range(q):
            a = fabs(v[i, j])
            if exponent == 1.0:
                acc += w[j] * a
            elif exponent == 2.0:
                acc += w[j] * (a * a)
            else:
                acc += w[j] * pow(a, exponent)
        o[i] = acc
    return out


def laplacian_1d(u, mask, double cx):
    cdef const double[::1] x = np.ascontiguousarray(u, dtype=np.float64)
    cdef const cnp.uint8_t[::1] m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t n = x.shape[0], i
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double left, right
    for i in range(n):
        if not m[i]:
            continue
        left = x[i - 1] if i > 0 and m[i - 1] else 0.0
        right = x[i + 1] if i < n - 1 and m[i + 1] else 0.0
        o[i] = cx * (2.0 * x[i] - left - right)
    return out


def laplacian_2d(u, mask, double cx, double cy):
    cdef const double[:, ::1] x = np.ascontiguousarray(u, dtype=np.float64)
    cdef const cnp.uint8_t[:, ::1] m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t nx = x.shape[0], ny = x.shape[1], i, j
    out = np.zeros((nx, ny), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double xm, xp, ym, yp
    for i in range(nx):
        for j in range(ny):
            if not m[i, j]:
                continue
            xm = x[i - 1, j] if i > 0 and m[i - 1, j] else 0.0
            xp = x[i + 1, j] if i < nx - 1 and m[i + 1, j] else 0.0
            ym = x[i, j - 1] if j > 0 and m[i, j - 1] else 0.0
            yp = x[i, j + 1] if j < ny - 1 and m[i, j + 1] else 0.0
            o[i, j] = cx * (2.0 * x[i, j] - xm - xp) + cy * (2.0 * x[i, j] - ym - yp)
    return out
