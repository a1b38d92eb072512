# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Extended-precision dense kernels: cyclic Jacobi, Cholesky, triangular solves.

All arrays are C-contiguous ``np.longdouble``.  Signatures mirror
``kernstab._core_py``.
"""

import numpy as np
cimport cython
from libc.math cimport fabsl, sqrtl

ctypedef long double ld


cdef inline ld _sign(ld x) nogil:
    return -1.0 if x < 0 else 1.0


def jacobi_eigh(ld[:, ::1] a, ld[:, ::1] v, ld rel_tol, ld abs_floor, int max_sweeps):
    """Diagonalise ``a`` in place by cyclic Jacobi; rotations accumulate into ``v``.

    Pair (p, q) is rotated when |a_pq| > max(rel_tol * sqrt|a_pp a_qq|, abs_floor).
    Returns (sweeps, rotations_in_last_sweep).  Pass ``v`` with zero rows to
    skip eigenvectors.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t nv = v.shape[0]
    cdef Py_ssize_t p, q, r
    cdef int sweep = 0
    cdef long rotations = 1
    cdef ld apq, app, aqq, theta, t, c, s, tau, g, h
    with nogil:
        while rotations > 0 and sweep < max_sweeps:
            rotations = 0
            sweep += 1
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    app = a[p, p]
                    aqq = a[q, q]
                    if fabsl(apq) <= rel_tol * sqrtl(fabsl(app * aqq)) or fabsl(apq) <= abs_floor:
                        a[p, q] = 0.0
                        a[q, p] = 0.0
                        continue
                    rotations += 1
                    theta = (aqq - app) / (2.0 * apq)
                    t = _sign(theta) / (fabsl(theta) + sqrtl(theta * theta + 1.0))
                    c = 1.0 / sqrtl(t * t + 1.0)
                    s = t * c
                    tau = s / (1.0 + c)
                    a[p, p] = app - t * apq
                    a[q, q] = aqq + t * apq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    for r in range(n):
                        if r == p or r == q:
                            continue
                        g = a[p, r]
                        h = a[q, r]
                        a[p, r] = g - s * (h + g * tau)
                        a[q, r] = h + s * (g - h * tau)
                        a[r, p] = a[p, r]
                        a[r, q] = a[q, r]
                    for r in range(nv):
                        g = v[r, p]
                        h = v[r, q]
                        v[r, p] = g - s * (h + g * tau)
                        v[r, q] = h + s * (g - h * tau)
    return sweep, rotations


def cholesky(ld[:, ::1] a):
    """In-place lower Cholesky factor; upper triangle zeroed.

    Returns -1 on success, otherwise the index of the first non-positive pivot.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, k
    cdef Py_ssize_t fail = -1
    cdef ld acc, g
    with nogil:
        for j in range(n):
            acc = a[j, j]
            for k in range(j):
                acc = acc - a[j, k] * a[j, k]
            if not acc > 0.0:
                fail = j
                break
            acc = sqrtl(acc)
            a[j, j] = acc
            for i in range(j + 1, n):
                g = a[i, j]
                for k in range(j):
                    g = g - a[i, k] * a[j, k]
                a[i, j] = g / acc
            for i in range(j + 1, n):
                a[j, i] = 0.0
    return fail


def forward_solve(ld[:, ::1] lower, ld[:, ::1] b):
    """Overwrite ``b`` with lower^{-1} b (column-wise forward substitution)."""
    cdef Py_ssize_t n = lower.shape[0]
    cdef Py_ssize_t m = b.shape[1]
    cdef Py_ssize_t i, k, col
    cdef ld acc
    with nogil:
        for i in range(n):
            for k in range(i):
                acc = lower[i, k]
                if acc != 0.0:
                    for col in range(m):
                        b[i, col] = b[i, col] - acc * b[k, col]
            acc = lower[i, i]
            for col in range(m):
                b[i, col] = b[i, col] / acc


def back_solve_t(ld[:, ::1] lower, ld[:, ::1] b):
    """Overwrite ``b`` with lower^{-T} b (back substitution with the transpose)."""
    cdef Py_ssize_t n = lower.shape[0]
    cdef Py_ssize_t m = b.shape[1]
    cdef Py_ssize_t i, k, col
    cdef ld acc
    with nogil:
        for i in range(n - 1, -1, -1):
            for k in range(i + 1, n):
                acc = lower[k, i]
                if acc != 0.0:
                    for col in range(m):
                        b[i, col] = b[i, col] - acc * b[k, col]
            acc = lower[i, i]
            for col in range(m):
                b[i, col] = b[i, col] / acc
