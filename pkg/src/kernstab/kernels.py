"""Radial kernels with their Fourier symbols.

The Fourier transform is the symmetric one,

    F[f](w) = (2 pi)^{-d/2} int f(x) exp(-i w.x) dx,

so that for every kernel ``a^T A a = (2 pi)^{-d/2} int symbol(|w|) |sum_j a_j e^{i w.x_j}|^2 dw``.
Profiles accept ``np.longdouble`` arrays and stay in extended precision
where the closed form allows it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .specialfn import gauss_legendre, normalized_bessel_j, scaled_bessel_k

SUPPORTED_DIMS = (1, 2, 3, 4)
MATERN_VARIANTS = ("basic", "linear", "quadratic")
SOBOLEV_ORDERS = (0.5, 1.0, 1.5, 2.0, 2.5, 3.5)

# Matern profiles p(r) e^{-r}: polynomial coefficients, lowest degree first
_MATERN_POLY = {
    "basic": (1.0,),
    "linear": (1.0, 1.0),
    "quadratic": (3.0, 3.0, 1.0),
}
_MATERN_SHIFT = {"basic": 1, "linear": 3, "quadratic": 5}


def sphere_area(dim: int) -> float:
    """Surface measure of the unit sphere S^{d-1}."""
    return 2.0 * math.pi ** (dim / 2) / math.gamma(dim / 2)


def ball_volume(dim: int, radius: float = 1.0) -> float:
    return math.pi ** (dim / 2) * radius**dim / math.gamma(dim / 2 + 1)


@dataclass(frozen=True)
class RadialKernel:
    """Translation-invariant kernel k(x, z) = profile(|x - z|).

    ``symbol`` is the radial Fourier symbol in the convention above.
    ``c_lower``/``c_upper`` bound ``symbol(rho) / (1 + rho^2)^{-tau}``; both
    are 1 for exact Sobolev symbols and ``None`` for the Gaussian.
    """

    id: str
    dim: int
    tau: float | None
    profile: Callable = field(repr=False)
    symbol: Callable = field(repr=False)
    symbol_exact: bool = False
    c_lower: float | None = None
    c_upper: float | None = None
    symbol_monotone: bool = True
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, x, z):
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        return self.profile(np.linalg.norm(x - z, axis=-1))

    @property
    def profile0(self) -> float:
        return float(self.profile(np.zeros(1))[0])

    def min_symbol_on_ball(self, radius: float) -> float:
        """min of symbol over |w| <= radius."""
        if self.symbol_monotone:
            return float(self.symbol(np.array([radius]))[0])
        grid = np.linspace(0.0, radius, 4001)
        return float(np.min(self.symbol(grid)))


def _num(x: float) -> str:
    """Shortest exact text for x, without a trailing ``.0``; ids round-trip through parse_kernel."""
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def _check_dim(dim: int) -> None:
    if dim not in SUPPORTED_DIMS:
        raise ValueError(f"dimension {dim} unsupported; use one of {SUPPORTED_DIMS}")


def _power_symbol(kappa: float, tau: float):
    def symbol(rho):
        rho = np.asarray(rho, dtype=float)
        return kappa * (1.0 + rho * rho) ** (-tau)

    return symbol


def make_matern(variant: str, dim: int) -> RadialKernel:
    """Basic, linear or quadratic Matern kernel with unit length scale.

    The profile is left unnormalised (``e^{-r}``, ``(1+r) e^{-r}``,
    ``(3+3r+r^2) e^{-r}``) and the symbol carries the exact constant
    ``kappa = (2 pi)^{-d/2} int profile``.
    """
    if variant not in MATERN_VARIANTS:
        raise ValueError(f"unknown Matern variant {variant!r}")
    _check_dim(dim)
    coeffs = _MATERN_POLY[variant]
    tau = (dim + _MATERN_SHIFT[variant]) / 2.0
    # int_0^inf r^{d-1+k} e^{-r} dr = Gamma(d+k)
    radial_mass = sum(c * math.gamma(dim + k) for k, c in enumerate(coeffs))
    kappa = (2 * math.pi) ** (-dim / 2) * sphere_area(dim) * radial_mass

    def profile(r):
        r = np.asarray(r)
        poly = np.zeros_like(r, dtype=r.dtype if r.dtype.kind == "f" else float)
        for c in reversed(coeffs):
            poly = poly * r + c
        return poly * np.exp(-r)

    return RadialKernel(
        id=f"matern-{variant}",
        dim=dim,
        tau=tau,
        profile=profile,
        symbol=_power_symbol(kappa, tau),
        symbol_exact=False,
        c_lower=kappa,
        c_upper=kappa,
        params={"variant": variant, "kappa": kappa},
    )


def sobolev_order(tau: float, dim: int) -> float:
    """Bessel-K order tau - d/2, validated against the supported set."""
    nu = tau - dim / 2.0
    for o in SOBOLEV_ORDERS:
        if abs(nu - o) < 1e-12:
            return o
    raise ValueError(
        f"Sobolev kernel tau={tau} in d={dim} needs tau - d/2 in {SOBOLEV_ORDERS}, got {nu}"
    )


def make_sobolev(tau: float, dim: int) -> RadialKernel:
    """Kernel with symbol exactly (1 + rho^2)^{-tau}.

    profile(r) = 2^{1-tau} / Gamma(tau) * r^nu K_nu(r), nu = tau - d/2, taken
    as its limit 2^{nu-1} Gamma(nu) at r = 0.
    """
    _check_dim(dim)
    nu = sobolev_order(tau, dim)
    scale = 2.0 ** (1.0 - tau) / math.gamma(tau)

    def profile(r):
        return scale * scaled_bessel_k(nu, np.asarray(r))

    return RadialKernel(
        id=f"sobolev:{_num(tau)}",
        dim=dim,
        tau=float(tau),
        profile=profile,
        symbol=_power_symbol(1.0, tau),
        symbol_exact=True,
        c_lower=1.0,
        c_upper=1.0,
        params={"nu": nu, "scale": scale},
    )


def make_gaussian(gamma: float, dim: int) -> RadialKernel:
    """exp(-gamma r^2) with symbol (2 gamma)^{-d/2} exp(-rho^2 / (4 gamma))."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    _check_dim(dim)
    amp = (2.0 * gamma) ** (-dim / 2)

    def profile(r):
        r = np.asarray(r)
        return np.exp(-gamma * r * r)

    def symbol(rho):
        rho = np.asarray(rho, dtype=float)
        return amp * np.exp(-rho * rho / (4.0 * gamma))

    return RadialKernel(
        id=f"gauss:{_num(gamma)}",
        dim=dim,
        tau=None,
        profile=profile,
        symbol=symbol,
        params={"gamma": gamma},
    )


_WENDLAND_RHO_MAX = 200.0
_WENDLAND_SAMPLES = 4001


def _wendland_symbol_table() -> tuple[np.ndarray, np.ndarray]:
    rho = np.linspace(0.0, _WENDLAND_RHO_MAX, _WENDLAND_SAMPLES)
    rule = gauss_legendre(32)
    edges = np.linspace(0.0, 1.0, 33)
    total = np.zeros_like(rho)
    for a, b in zip(edges[:-1], edges[1:]):
        r, w = rule.scaled(a, b)
        f = (1.0 - r) ** 2 * r * r
        total += (normalized_bessel_j(0.5, np.outer(rho, r)) * f) @ w
    return rho, (2 * math.pi) ** -1.5 * sphere_area(3) * total


def make_wendland_3_0() -> RadialKernel:
    """Wendland's (1 - r)_+^2 in d = 3, tau = 2.

    The symbol is tabulated by a radial quadrature on [0, 200] and
    interpolated monotonically; beyond the table it continues as
    C (1 + rho^2)^{-2} matched at the last sample.
    """
    rho_tab, sym_tab = _wendland_symbol_table()
    interp = PchipInterpolator(rho_tab, sym_tab)
    tail = float(sym_tab[-1] * (1.0 + _WENDLAND_RHO_MAX**2) ** 2)

    def profile(r):
        r = np.asarray(r)
        return np.where(r < 1.0, (1.0 - r) ** 2, 0.0 * r)

    def symbol(rho):
        rho = np.asarray(rho, dtype=float)
        inside = rho <= _WENDLAND_RHO_MAX
        out = np.empty(rho.shape)
        out[inside] = interp(rho[inside])
        out[~inside] = tail * (1.0 + rho[~inside] ** 2) ** -2.0
        return out if rho.ndim else float(out)

    grid = np.arange(0, 501) * 0.1
    ratios = symbol(grid) * (1.0 + grid**2) ** 2.0
    return RadialKernel(
        id="wendland-3-0",
        dim=3,
        tau=2.0,
        profile=profile,
        symbol=symbol,
        c_lower=float(ratios.min()),
        c_upper=float(ratios.max()),
        symbol_monotone=False,
        params={"tail_constant": tail},
    )


def parse_kernel(spec: str, dim: int) -> RadialKernel:
    """Build a kernel from a CLI selection string.

    Accepted: ``matern-basic``, ``matern-linear``, ``matern-quadratic``,
    ``sobolev:<tau>``, ``gauss:<gamma>``, ``wendland-3-0``.
    """
    s = spec.strip().lower()
    if s.startswith("matern-"):
        return make_matern(s.split("-", 1)[1], dim)
    if s.startswith("sobolev:"):
        return make_sobolev(float(s.split(":", 1)[1]), dim)
    if s.startswith("gauss:"):
        return make_gaussian(float(s.split(":", 1)[1]), dim)
    if s == "wendland-3-0":
        if dim != 3:
            raise ValueError("wendland-3-0 is defined for dim 3 only")
        return make_wendland_3_0()
    raise ValueError(f"unknown kernel spec {spec!r}")


def snap_tau(tau: float, dim: int, tol: float = 1e-6) -> float:
    """Round tau onto the nearest supported Sobolev smoothness if within ``tol``.

    Lets command lines such as ``--sigma 0.3333333`` address the tau = 1 kernel.
    """
    for o in SOBOLEV_ORDERS:
        cand = o + dim / 2.0
        if abs(tau - cand) <= tol * max(1.0, cand):
            return cand
    return tau
