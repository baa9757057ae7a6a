# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot-loop kernels; see _fallback.py for the reference semantics."""

from libc.math cimport sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef double SQ2 = sqrt(2.0)


def penalty_value_grad(x, int m, int obj_code, double mu):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] grad = np.zeros(xa.shape[0], dtype=np.float64)
    cdef double[::1] xv = xa
    cdef double[::1] gv = grad
    cdef int i, j, bi, bj
    cdef double val = 0.0
    cdef double s1, s2, s3, rho, g, coef, t, v
    cdef double dx, dy, dz, d, pen
    cdef double inv_m = 1.0 / m

    if obj_code == 0:
        for i in range(m):
            bi = 3 * i
            val += (xv[bi] * xv[bi] + xv[bi + 1] * xv[bi + 1] + xv[bi + 2] * xv[bi + 2]) * inv_m
            gv[bi] += 2.0 * xv[bi] * inv_m
            gv[bi + 1] += 2.0 * xv[bi + 1] * inv_m
            gv[bi + 2] += 2.0 * xv[bi + 2] * inv_m
    elif obj_code == 1:
        for i in range(m):
            val += xv[3 * i] * inv_m
            gv[3 * i] += inv_m
    else:
        t = xv[3 * m]
        val += t
        gv[3 * m] += 1.0
        for i in range(m):
            bi = 3 * i
            rho = sqrt(xv[bi + 1] * xv[bi + 1] + xv[bi + 2] * xv[bi + 2])
            g = xv[bi] + SQ2 * rho - t
            if g > 0.0:
                val += mu * g * g
                coef = 2.0 * mu * g
                gv[bi] += coef
                gv[3 * m] -= coef
                if rho > 1e-12:
                    gv[bi + 1] += coef * SQ2 * xv[bi + 1] / rho
                    gv[bi + 2] += coef * SQ2 * xv[bi + 2] / rho

    # cone penalty
    for i in range(m):
        bi = 3 * i
        rho = sqrt(xv[bi + 1] * xv[bi + 1] + xv[bi + 2] * xv[bi + 2])
        v = SQ2 * rho - xv[bi]
        if v > 0.0:
            val += mu * v * v
            coef = 2.0 * mu * v
            gv[bi] -= coef
            if rho > 1e-12:
                gv[bi + 1] += coef * SQ2 * xv[bi + 1] / rho
                gv[bi + 2] += coef * SQ2 * xv[bi + 2] / rho

    # pairwise minimum-distance penalty
    for i in range(m):
        bi = 3 * i
        for j in range(i + 1, m):
            bj = 3 * j
            dx = xv[bi] - xv[bj]
            dy = xv[bi + 1] - xv[bj + 1]
            dz = xv[bi + 2] - xv[bj + 2]
            d = sqrt(dx * dx + dy * dy + dz * dz)
            if d < 1.0:
                if d < 1e-12:
                    d = 1e-12
                pen = 1.0 - d
                val += mu * pen * pen
                coef = -2.0 * mu * pen / d
                gv[bi] += coef * dx
                gv[bi + 1] += coef * dy
                gv[bi + 2] += coef * dz
                gv[bj] -= coef * dx
                gv[bj + 1] -= coef * dy
                gv[bj + 2] -= coef * dz

    return val, grad


def count_detection_errors(y, points, true_idx):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ya = np.ascontiguousarray(y, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pa = np.ascontiguousarray(points, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ia = np.ascontiguousarray(true_idx, dtype=np.int64)
    cdef double[:, ::1] yv = ya
    cdef double[:, ::1] pv = pa
    cdef long long[::1] iv = ia
    cdef Py_ssize_t n = ya.shape[0]
    cdef Py_ssize_t mm = pa.shape[0]
    cdef Py_ssize_t k, j, best
    cdef double y1, y2, y3, d1, d2, d3, dist, bestdist
    cdef long long errors = 0

    for k in range(n):
        y1 = yv[k, 0]
        y2 = yv[k, 1]
        y3 = yv[k, 2]
        best = 0
        bestdist = 1e308
        for j in range(mm):
            d1 = y1 - pv[j, 0]
            d2 = y2 - pv[j, 1]
            d3 = y3 - pv[j, 2]
            dist = d1 * d1 + d2 * d2 + d3 * d3
            if dist < bestdist:
                bestdist = dist
                best = j
        if best != iv[k]:
            errors += 1
    return int(errors)
