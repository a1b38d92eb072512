"""Pure numpy (``np.longdouble``) fallback for :mod:`kernstab._core`.

Same signatures and in-place semantics; one rotation costs a handful of
vectorised row updates instead of a compiled loop.
"""

from __future__ import annotations

import numpy as np


def jacobi_eigh(a, v, rel_tol, abs_floor, max_sweeps):
    n = a.shape[0]
    nv = v.shape[0]
    sweep = 0
    rotations = 1
    one = np.longdouble(1)
    two = np.longdouble(2)
    while rotations > 0 and sweep < max_sweeps:
        rotations = 0
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                app = a[p, p]
                aqq = a[q, q]
                if abs(apq) <= rel_tol * np.sqrt(abs(app * aqq)) or abs(apq) <= abs_floor:
                    a[p, q] = 0
                    a[q, p] = 0
                    continue
                rotations += 1
                theta = (aqq - app) / (two * apq)
                sign = -one if theta < 0 else one
                t = sign / (abs(theta) + np.sqrt(theta * theta + one))
                c = one / np.sqrt(t * t + one)
                s = t * c
                tau = s / (one + c)
                g = a[p].copy()
                h = a[q].copy()
                a[p] = g - s * (h + g * tau)
                a[q] = h + s * (g - h * tau)
                a[:, p] = a[p]
                a[:, q] = a[q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0
                a[q, p] = 0
                if nv:
                    g = v[:, p].copy()
                    h = v[:, q].copy()
                    v[:, p] = g - s * (h + g * tau)
                    v[:, q] = h + s * (g - h * tau)
    return sweep, rotations


def cholesky(a):
    n = a.shape[0]
    for j in range(n):
        acc = a[j, j] - np.dot(a[j, :j], a[j, :j])
        if not acc > 0:
            return j
        acc = np.sqrt(acc)
        a[j, j] = acc
        if j + 1 < n:
            a[j + 1:, j] = (a[j + 1:, j] - a[j + 1:, :j] @ a[j, :j]) / acc
            a[j, j + 1:] = 0
    return -1


def forward_solve(lower, b):
    n = lower.shape[0]
    for i in range(n):
        if i:
            b[i] -= lower[i, :i] @ b[:i]
        b[i] /= lower[i, i]


def back_solve_t(lower, b):
    n = lower.shape[0]
    for i in range(n - 1, -1, -1):
        if i + 1 < n:
            b[i] -= lower[i + 1:, i] @ b[i + 1:]
        b[i] /= lower[i, i]
