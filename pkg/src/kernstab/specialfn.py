"""Bessel functions, Bessel zeros and Gauss-Legendre rules.

Only the orders needed for balls in dimensions 1 to 4 and for the
Matern/Sobolev kernels are supported: J of integer and half-integer order,
K of half-integer order.  Everything is vectorised over the argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

# Series / asymptotic seam for integer-order J.
SERIES_SWITCH = 12.0
_SERIES_TERMS = 80
_HANKEL_TERMS = 40


class UnsupportedOrderError(ValueError):
    """Raised for Bessel orders outside the supported half-integer lattice."""


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights on [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.nodes)

    def integrate(self, f, a: float, b: float) -> float:
        """Integrate a vectorised ``f`` over ``[a, b]``."""
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        return float(half * np.dot(self.weights, f(mid + half * self.nodes)))

    def scaled(self, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights mapped affinely onto ``[a, b]``."""
        half = 0.5 * (b - a)
        return 0.5 * (a + b) + half * self.nodes, half * self.weights


def _check_order(order: float) -> tuple[float, bool]:
    twice = 2.0 * order
    if order < -0.5 or abs(twice - round(twice)) > 1e-12:
        raise UnsupportedOrderError(
            f"Bessel order {order!r} unsupported: need a multiple of 1/2 that is >= -1/2"
        )
    half_int = int(round(twice)) % 2 == 1
    return round(twice) / 2.0, half_int


def _series(order: float, x: np.ndarray) -> np.ndarray:
    """Power series sum_k (-x^2/4)^k / (k! Gamma(k+order+1)), without (x/2)^order."""
    z = -0.25 * x * x
    term = np.full_like(x, 1.0 / math.gamma(order + 1.0))
    total = term.copy()
    for k in range(_SERIES_TERMS):
        term = term * z / ((k + 1.0) * (k + 1.0 + order))
        total += term
        if np.all(np.abs(term) <= 1e-18 * np.abs(total)):
            break
    return total


def _hankel(order: int, x: np.ndarray) -> np.ndarray:
    """Hankel asymptotic expansion of J_order for large x, truncated at the smallest term."""
    mu = 4.0 * order * order
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    alive = np.ones(x.shape, dtype=bool)
    for k in range(1, _HANKEL_TERMS):
        new = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        # stop each entry once its terms start growing
        alive &= np.abs(new) < np.abs(term)
        new = np.where(alive, new, 0.0)
        if k % 2 == 1:
            q += (-1) ** ((k - 1) // 2) * new
        else:
            p += (-1) ** (k // 2) * new
        term = np.where(alive, new, term)
        if not alive.any():
            break
    chi = x - (0.5 * order + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _upward(j_lo: np.ndarray, j_hi: np.ndarray, nu_hi: float, target: float, x: np.ndarray):
    """Forward recurrence J_{nu+1} = (2 nu / x) J_nu - J_{nu-1}, stable for x > nu."""
    nu = nu_hi
    while nu < target - 1e-12:
        j_lo, j_hi = j_hi, (2.0 * nu / x) * j_hi - j_lo
        nu += 1.0
    return j_hi


def _large_x(order: float, half_int: bool, x: np.ndarray) -> np.ndarray:
    if half_int:
        s = np.sqrt(2.0 / (math.pi * x))
        jm = s * np.cos(x)  # J_{-1/2}
        if order == -0.5:
            return jm
        return _upward(jm, s * np.sin(x), 0.5, order, x)
    j0 = _hankel(0, x)
    if order == 0:
        return j0
    return _upward(j0, _hankel(1, x), 1.0, order, x)


def bessel_j(order: float, x):
    """Bessel function of the first kind J_order(x) for x >= 0.

    ``order`` must be an integer or half-integer >= -1/2.  Small arguments use
    the power series; integer orders switch to the Hankel expansion at
    ``x = 12``, half-integer orders to their trigonometric closed forms once
    upward recurrence is stable.
    """
    order, half_int = _check_order(order)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise ValueError("bessel_j requires x >= 0")
    flat = np.atleast_1d(xa).ravel()
    out = np.empty_like(flat)
    switch = max(2.0 * order + 1.0, 1.0) if half_int else SERIES_SWITCH
    small = flat < switch
    if small.any():
        xs = flat[small]
        with np.errstate(divide="ignore"):
            pref = np.power(0.5 * xs, order)
        out[small] = pref * _series(order, xs)
    if (~small).any():
        out[~small] = _large_x(order, half_int, flat[~small])
    if np.ndim(x) == 0:
        return float(out[0])
    return out.reshape(xa.shape)


def normalized_bessel_j(order: float, x):
    """Gamma(order+1) (2/x)^order J_order(x), equal to 1 at x = 0.

    For order = d/2 - 1 this is the spherical mean of exp(i w.y) over the
    sphere |w| = x/|y| in R^d (cos, J0, sin(x)/x, 2 J1(x)/x for d = 1..4).
    """
    order, half_int = _check_order(order)
    xa = np.abs(np.asarray(x, dtype=float))
    flat = np.atleast_1d(xa).ravel()
    out = np.empty_like(flat)
    g = math.gamma(order + 1.0)
    if half_int and order == -0.5:
        out = np.cos(flat)
    else:
        switch = max(2.0 * order + 1.0, 1.0) if half_int else SERIES_SWITCH
        small = flat < switch
        if small.any():
            out[small] = g * _series(order, flat[small])
        if (~small).any():
            xl = flat[~small]
            out[~small] = g * np.power(2.0 / xl, order) * _large_x(order, half_int, xl)
    if np.ndim(x) == 0:
        return float(out[0])
    return out.reshape(xa.shape)


@lru_cache(maxsize=None)
def bessel_j_first_zero(order: float) -> float:
    """Smallest positive root of J_order.

    Brackets the root with a coarse scan of step 0.1 starting at 0.1, then
    bisects to machine resolution.
    """
    order, _ = _check_order(order)
    f = lambda t: bessel_j(order, t)  # noqa: E731
    a = 0.1
    fa = f(a)
    while True:
        b = a + 0.1
        fb = f(b)
        if fa == 0.0:
            return a
        if fa * fb <= 0.0:
            break
        a, fa = b, fb
        if a > 1000.0:
            raise RuntimeError(f"no sign change found for J_{order}")
    while b - a > 1e-15 * b:
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if fa * fm < 0.0:
            b = m
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


_K_ORDERS = (0.5, 1.5, 2.5, 3.5)


def _k_poly_coeffs(n: int) -> list[float]:
    # K_{n+1/2}(x) = sqrt(pi/(2x)) e^{-x} sum_k (n+k)!/(k!(n-k)!) (2x)^{-k}
    return [math.factorial(n + k) / (math.factorial(k) * math.factorial(n - k) * 2.0**k)
            for k in range(n + 1)]


def bessel_k_half_integer(order: float, x):
    """Modified Bessel function K_order(x) for order in {1/2, 3/2, 5/2, 7/2}, x > 0."""
    if not any(abs(order - o) < 1e-12 for o in _K_ORDERS):
        raise UnsupportedOrderError(f"K order {order!r} not in {_K_ORDERS}")
    xa = np.asarray(x)
    if np.any(xa <= 0):
        raise ValueError("bessel_k_half_integer requires x > 0")
    n = int(round(order - 0.5))
    inv = 1.0 / xa
    poly = np.zeros_like(inv)
    for c in reversed(_k_poly_coeffs(n)):
        poly = poly * inv + c
    val = np.sqrt(0.5 * math.pi * inv) * np.exp(-xa) * poly
    return float(val) if np.ndim(x) == 0 else val


def scaled_bessel_k(order: float, r):
    """r^order K_order(r) for r >= 0, continuously extended to r = 0.

    Half-integer orders use the closed form as a polynomial times e^{-r},
    so extended-precision (``np.longdouble``) input stays extended.
    Orders 1 and 2 go through ``scipy.special.kve`` in double precision.
    """
    ra = np.asarray(r)
    if any(abs(order - o) < 1e-12 for o in _K_ORDERS):
        n = int(round(order - 0.5))
        coeffs = _k_poly_coeffs(n)
        # r^{n+1/2} K_{n+1/2}(r) = sqrt(pi/2) e^{-r} sum_k c_k r^{n-k}
        poly = np.zeros_like(ra) if ra.dtype.kind == "f" else np.zeros(ra.shape)
        for c in coeffs:
            poly = poly * ra + c
        val = math.sqrt(0.5 * math.pi) * np.exp(-ra) * poly
        return val if np.ndim(r) else val.item()
    if abs(order - round(order)) < 1e-12 and round(order) in (1, 2):
        return _scaled_k_integer(int(round(order)), r)
    raise UnsupportedOrderError(f"scaled K order {order!r} unsupported")


def _scaled_k_integer(n: int, r):
    ra = np.atleast_1d(np.asarray(r, dtype=float)).ravel()
    out = np.full_like(ra, 2.0 ** (n - 1) * math.gamma(n))
    pos = ra > 0.0
    # kve(n, x) = e^x K_n(x); recombine in log space so large x underflows cleanly to 0
    x = ra[pos]
    out[pos] = np.exp(n * np.log(x) - x + np.log(special.kve(n, x)))
    return out.reshape(np.shape(r)) if np.ndim(r) else float(out[0])


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule by Newton iteration on the Legendre recurrence."""
    if not 1 <= n <= 4096:
        raise ValueError(f"gauss_legendre: n={n} outside [1, 4096]")
    if n == 1:
        return QuadratureRule(np.array([0.0]), np.array([2.0]))
    m = (n + 1) // 2
    i = np.arange(1, m + 1)
    x = np.cos(math.pi * (i - 0.25) / (n + 0.5))
    for _ in range(100):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for k in range(2, n + 1):
            p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        dp = n * (x * p1 - p0) / (x * x - 1.0)
        dx = p1 / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    p0 = np.ones_like(x)
    p1 = x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    nodes = np.concatenate([-x, x[::-1][n % 2:]])
    weights = np.concatenate([w, w[::-1][n % 2:]])
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return QuadratureRule(nodes, weights)
