"""Ingham-type inequality machinery.

Constants come from the principal Dirichlet eigenpair of -Laplace on the
ball of radius 1/2.  Integrals of |sum_j a_j exp(i w.x_j)|^2 over balls are
evaluated in closed form through normalised Bessel functions; weighted
integrals (localisation) use adaptive Gauss-Legendre panels on the radial
variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .gram import quadratic_form, assemble
from .kernels import RadialKernel, SUPPORTED_DIMS, ball_volume, sphere_area
from .pointsets import PointSet, pairwise_distances
from .specialfn import bessel_j_first_zero, gauss_legendre, normalized_bessel_j


def _check_dim(dim: int) -> None:
    if dim not in SUPPORTED_DIMS:
        raise ValueError(f"dimension {dim} unsupported; use one of {SUPPORTED_DIMS}")


@dataclass(frozen=True)
class InghamConstants:
    dim: int
    lambda_min_dirichlet: float
    c0: float
    c1: float
    c2: float
    beta: float

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "lambda_min_dirichlet": self.lambda_min_dirichlet,
            "c0": self.c0,
            "c1": self.c1,
            "c2": self.c2,
            "beta": self.beta,
        }


def dirichlet_lambda_min(dim: int) -> float:
    """Smallest Dirichlet eigenvalue of -Laplace on B_{1/2}(0) in R^dim: (2 j_{d/2-1,1})^2."""
    _check_dim(dim)
    j = bessel_j_first_zero(dim / 2.0 - 1.0)
    return (2.0 * j) ** 2


@dataclass(frozen=True)
class BetaResult:
    beta: float
    rho_min: float
    h_min: float
    h0: float


_GL_BETA = 96


def _ground_state(dim: int):
    """Radial nodes/weights on [0, 1/2] and the L2-normalised ground state there."""
    nu = dim / 2.0 - 1.0
    j = bessel_j_first_zero(nu)
    r, w = gauss_legendre(_GL_BETA).scaled(0.0, 0.5)
    shape = normalized_bessel_j(nu, 2.0 * j * r)
    mass = sphere_area(dim) * np.dot(w, shape * shape * r ** (dim - 1))
    return r, w, shape / math.sqrt(mass)


def fourier_ground_state(dim: int, rho):
    """Fourier transform h(rho) of the normalised positive ground state H, extended by zero."""
    _check_dim(dim)
    nu = dim / 2.0 - 1.0
    r, w, H = _ground_state(dim)
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    weights = w * H * r ** (dim - 1)
    vals = normalized_bessel_j(nu, np.outer(rho, r)) @ weights
    return (2 * math.pi) ** (-dim / 2) * sphere_area(dim) * vals


def compute_beta(dim: int) -> BetaResult:
    """beta = (2 pi)^{d/2} (min_{|w| <= pi} h(w))^2.

    Minimum by a 2001-point scan of [0, pi] refined with a bounded scalar
    search around the best sample.
    """
    _check_dim(dim)
    grid = np.linspace(0.0, math.pi, 2001)
    vals = fourier_ground_state(dim, grid)
    i = int(np.argmin(vals))
    rho_best, h_best = float(grid[i]), float(vals[i])
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    if hi > lo:
        res = minimize_scalar(lambda t: float(fourier_ground_state(dim, t)[0]),
                              bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        if res.fun < h_best:
            rho_best, h_best = float(res.x), float(res.fun)
    beta = (2 * math.pi) ** (dim / 2) * h_best**2
    return BetaResult(beta, rho_best, h_best, float(vals[0]))


def ingham_constants(dim: int) -> InghamConstants:
    lam = dirichlet_lambda_min(dim)
    beta = compute_beta(dim).beta
    return InghamConstants(
        dim=dim,
        lambda_min_dirichlet=lam,
        c0=math.sqrt(2.0) * math.sqrt(lam),
        c1=math.pi ** (dim / 2) / (2.0 * lam ** (dim / 2)),
        c2=(2.0 / math.pi) ** (dim / 2) / beta,
        beta=beta,
    )


def _pair_weights(ps: PointSet, alpha) -> tuple[np.ndarray, np.ndarray]:
    """Distinct-pair distances and weights so that sum_jk a_j a_k f(r_jk) = sum w f(r)."""
    a = np.asarray(alpha, dtype=float)
    if a.shape != (ps.n,):
        raise ValueError(f"alpha must have length {ps.n}")
    n = ps.n
    if n == 1:
        return np.zeros(1), np.array([a[0] ** 2])
    dist = pairwise_distances(ps.points)
    iu, ju = np.triu_indices(n, k=1)
    r = np.concatenate([[0.0], dist[iu, ju]])
    w = np.concatenate([[np.dot(a, a)], 2.0 * a[iu] * a[ju]])
    return r, w


def exp_sum_ball_integral(ps: PointSet, alpha, R: float, center=None) -> float:
    """int_{B_R(center)} |sum_j alpha_j exp(i w.x_j)|^2 dw, in closed form.

    Uses int_{B_R} exp(i w.y) dw = vol(B_R) Gamma(d/2+1) (2/(R|y|))^{d/2} J_{d/2}(R|y|).
    The value does not depend on ``center``.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    if center is not None and np.shape(center) != (ps.dim,):
        raise ValueError("center has wrong dimension")
    r, w = _pair_weights(ps, alpha)
    vals = normalized_bessel_j(ps.dim / 2.0, R * r)
    return float(ball_volume(ps.dim, R) * np.dot(w, vals))


@dataclass(frozen=True)
class InghamCheck:
    mode: str
    R_used: float
    ratio: float
    bound: float
    holds: bool
    margin: float


def verify_ingham(ps: PointSet, alpha, consts: InghamConstants, mode: str, rel_tol: float = 1e-9) -> InghamCheck:
    """Check one side of the Ingham inequality.

    ``lower``: R = c0/q_X and ratio = I / (R^d |alpha|^2) >= c1.
    ``upper``: R = pi/q_X and ratio <= c2.
    ``margin`` is the relative slack (negative when violated).
    """
    if ps.n < 2:
        raise ValueError("Ingham check needs at least two points (q_X undefined)")
    if consts.dim != ps.dim:
        raise ValueError("constants computed for a different dimension")
    q = ps.q
    a = np.asarray(alpha, dtype=float)
    norm2 = float(np.dot(a, a))
    if norm2 == 0:
        raise ValueError("alpha must be nonzero")
    if mode == "lower":
        R, bound = consts.c0 / q, consts.c1
    elif mode == "upper":
        R, bound = math.pi / q, consts.c2
    else:
        raise ValueError(f"mode must be 'lower' or 'upper', got {mode!r}")
    ratio = exp_sum_ball_integral(ps, a, R) / (R**ps.dim * norm2)
    margin = (ratio - bound) / bound if mode == "lower" else (bound - ratio) / bound
    return InghamCheck(mode, R, ratio, bound, margin >= -rel_tol, margin)


# adaptive radial quadrature ------------------------------------------------

_MAX_PANELS = 10_000
_PANEL_RTOL = 1e-10
_PANEL_FLOOR = 1e-13


def _radial_integrand(kernel: RadialKernel, r: np.ndarray, w: np.ndarray, tau: float):
    d = kernel.dim
    nu = d / 2.0 - 1.0
    area = sphere_area(d)

    def f(rho):
        mean = normalized_bessel_j(nu, np.outer(rho, r)) @ w
        return area * rho ** (d - 1) * (1.0 + rho * rho) ** (-tau) * mean

    return f


def _adaptive(f, a: float, b: float, scale: float, r_max: float) -> tuple[float, int]:
    g32, g64 = gauss_legendre(32), gauss_legendre(64)
    # start with panels spanning a few oscillations of the widest pair
    width = 8.0 * math.pi / max(r_max, 1e-300)
    edges = [a]
    x = a
    while x < b:
        x = min(b, x + width)
        edges.append(x)
        if len(edges) > 64:
            width *= 2.0
    stack = list(zip(edges[:-1], edges[1:]))[::-1]
    total = 0.0
    panels = 0
    while stack:
        lo, hi = stack.pop()
        x32, w32 = g32.scaled(lo, hi)
        x64, w64 = g64.scaled(lo, hi)
        i32 = float(np.dot(w32, f(x32)))
        i64 = float(np.dot(w64, f(x64)))
        if abs(i64 - i32) <= max(_PANEL_RTOL * abs(i64), _PANEL_FLOOR * scale) or panels + len(stack) >= _MAX_PANELS:
            total += i64
            panels += 1
        else:
            mid = 0.5 * (lo + hi)
            stack.append((mid, hi))
            stack.append((lo, mid))
    return total, panels


def _full_space(kernel: RadialKernel, ps: PointSet, alpha) -> float:
    """(2 pi)^{d/2} alpha^T A alpha, the integral over all of R^d."""
    return (2 * math.pi) ** (ps.dim / 2) * quadratic_form(assemble(kernel, ps), alpha)


def localization_profile(kernel: RadialKernel, ps: PointSet, alpha, radii) -> np.ndarray:
    """Localisation ratios for increasing ``radii``, integrating successive shells.

    Entry i is int_{B_{2 R_i}} (1+|w|^2)^{-tau} |sum_j a_j e^{i w.x_j}|^2 dw divided by
    (2 pi)^{d/2} a^T A a.
    """
    if not kernel.symbol_exact:
        raise ValueError("localisation needs a kernel with exact symbol (1+rho^2)^-tau")
    if kernel.dim != ps.dim:
        raise ValueError("kernel and point set dimensions differ")
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0) or np.any(np.diff(radii) < 0):
        raise ValueError("radii must be positive and nondecreasing")
    r, w = _pair_weights(ps, alpha)
    total = _full_space(kernel, ps, alpha)
    f = _radial_integrand(kernel, r, w, kernel.tau)
    r_max = float(r.max()) if r.size else 1.0
    out = np.empty(len(radii))
    acc = 0.0
    prev = 0.0
    for i, R in enumerate(radii):
        if 2 * R > prev:
            part, _ = _adaptive(f, prev, 2.0 * R, total, r_max)
            acc += part
            prev = 2.0 * R
        out[i] = acc / total
    return out


def localization_ratio(kernel: RadialKernel, ps: PointSet, alpha, R: float) -> float:
    """Fraction of (2 pi)^{d/2} a^T A a carried by frequencies in B_{2R}(0)."""
    if not R > 0:
        raise ValueError("R must be positive")
    return float(localization_profile(kernel, ps, alpha, [R])[0])


@dataclass(frozen=True)
class LocalizationSearch:
    eps: float
    a_eps: float
    R: float
    ratio: float
    found: bool


def localization_radius(kernel: RadialKernel, ps: PointSet, alpha, eps: float = 0.5,
                        max_factor: float = 50.0, tol: float = 1e-3) -> LocalizationSearch:
    """Smallest a = R q_X (to ``tol``) with localisation ratio >= 1 - eps.

    Empirical stand-in for the non-constructive localisation constant; the ratio is
    increasing in R, so bisection on a is valid.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    q = ps.q
    target = 1.0 - eps
    ratio_at = lambda a: localization_ratio(kernel, ps, alpha, a / q)  # noqa: E731
    hi = max_factor
    r_hi = ratio_at(hi)
    if r_hi < target:
        return LocalizationSearch(eps, math.inf, hi / q, r_hi, False)
    lo = 1e-3
    if ratio_at(lo) >= target:
        return LocalizationSearch(eps, lo, lo / q, ratio_at(lo), True)
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        r_mid = ratio_at(mid)
        if r_mid >= target:
            hi, r_hi = mid, r_mid
        else:
            lo = mid
    return LocalizationSearch(eps, hi, hi / q, r_hi, True)
