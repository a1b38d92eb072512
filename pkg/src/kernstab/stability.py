"""Smallest-eigenvalue lower bounds and the cross-smoothness sandwich.

Lower bounds follow from the Ingham inequality: on B_{c0/q} the exponential
sum carries at least ``c1 R^d |alpha|^2``, and the symbol is at least its
boundary value there.  The sandwich compares Rayleigh quotients of a kernel
matrix with symbol (1+rho^2)^{-tau} against the one for (1+rho^2)^{-sigma tau}.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .gram import GramMatrix, assemble, ratio_extremes, rayleigh, sym_eig
from .ingham import InghamConstants
from .kernels import RadialKernel, parse_kernel
from .pointsets import generate

log = logging.getLogger(__name__)

SANDWICH_RTOL = 1e-10


def _prefactor(consts: InghamConstants) -> float:
    d = consts.dim
    return consts.c0**d * consts.c1 / (2 * math.pi) ** (d / 2)


def _check_q(q_X: float) -> None:
    if not q_X > 0:
        raise ValueError("q_X must be positive")


def lambda_min_lower_general(kernel: RadialKernel, q_X: float, consts: InghamConstants) -> float:
    """c0^d c1 (2 pi)^{-d/2} min_{|w| <= c0/q} symbol(w) q^{-d}."""
    _check_q(q_X)
    if kernel.dim != consts.dim:
        raise ValueError("kernel and constants have different dimensions")
    radius = consts.c0 / q_X
    return _prefactor(consts) * kernel.min_symbol_on_ball(radius) * q_X ** (-consts.dim)


def lambda_min_lower_sobolev(tau: float, dim: int, q_X: float, c_lower: float,
                             consts: InghamConstants) -> float:
    """c0^d c1 c_lower (2 pi)^{-d/2} (q^2 + c0^2)^{-tau} q^{2 tau - d}.

    ``c_lower`` is a lower constant for symbol(rho) (1+rho^2)^{tau}.
    """
    _check_q(q_X)
    if not tau > dim / 2:
        raise ValueError("need tau > d/2")
    if consts.dim != dim:
        raise ValueError("constants computed for a different dimension")
    return (_prefactor(consts) * c_lower * (q_X**2 + consts.c0**2) ** (-tau)
            * q_X ** (2 * tau - dim))


def lambda_min_lower_gaussian(gamma: float, dim: int, q_X: float, consts: InghamConstants,
                              variant: str = "basic") -> float:
    """Lower bound for exp(-gamma r^2).

    ``basic`` evaluates the general bound at the Gaussian symbol,
    (2 gamma)^{-d/2} exp(-c0^2 / (4 gamma q^2)).  ``improved`` (d >= 3) uses the
    exponent constant d(d+4) in place of c0^2/4.
    """
    _check_q(q_X)
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if consts.dim != dim:
        raise ValueError("constants computed for a different dimension")
    if variant == "basic":
        expo = consts.c0**2 / 4.0
    elif variant == "improved":
        if dim < 3:
            raise ValueError("improved Gaussian bound needs d >= 3")
        expo = dim * (dim + 4.0)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    amp = (2.0 * gamma) ** (-dim / 2)
    return _prefactor(consts) * amp * q_X ** (-dim) * math.exp(-expo / (gamma * q_X**2))


def lambda_min_lower(kernel: RadialKernel, q_X: float, consts: InghamConstants) -> dict[str, float]:
    """Every bound applicable to ``kernel``, keyed by name."""
    out = {"general": lambda_min_lower_general(kernel, q_X, consts)}
    if kernel.tau is not None and kernel.c_lower is not None:
        out["sobolev"] = lambda_min_lower_sobolev(kernel.tau, kernel.dim, q_X, kernel.c_lower, consts)
    if "gamma" in kernel.params:
        g = kernel.params["gamma"]
        out["gaussian_basic"] = lambda_min_lower_gaussian(g, kernel.dim, q_X, consts, "basic")
        if kernel.dim >= 3:
            out["gaussian_improved"] = lambda_min_lower_gaussian(g, kernel.dim, q_X, consts, "improved")
    return out


def c_sigma(sigma: float, consts: InghamConstants, a: float) -> float:
    """Constant of the upper sandwich half for a localisation constant ``a``.

    2^{1+d(1-s)} c2^{1-s} (2 pi)^{-(1-s) d/2} max(a, pi)^{d(1-s)} (c0^d c1 (2 pi)^{-d/2})^{-(1-s)}.
    """
    d = consts.dim
    e = 1.0 - sigma
    return (2.0 ** (1 + d * e) * consts.c2**e * (2 * math.pi) ** (-e * d / 2)
            * max(a, math.pi) ** (d * e) * _prefactor(consts) ** (-e))


def c_sigma_prime(sigma: float, tau: float, consts: InghamConstants, a: float, q_sup: float) -> float:
    """c_sigma times sup_{q <= q_sup} (q^{2 tau} + c0^2)^{(1-sigma) tau}.

    The q^{2 tau} inside the bracket is kept as stated for this constant even though
    the lower bound carries q^2 in the analogous place.
    """
    return c_sigma(sigma, consts, a) * (q_sup ** (2 * tau) + consts.c0**2) ** ((1 - sigma) * tau)


@dataclass
class SandwichReport:
    sigma: float
    tau: float
    q_X: float
    lower_holds: bool
    worst_violation: float
    empirical_max_ratio: float
    empirical_min_ratio: float
    bound_shape: float
    shape_ratio: float
    eigen_order_holds: bool
    worst_eigen_violation: float
    n_alpha: int
    C: float = 1.0
    C1: float = 1.0
    warnings: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def _same_points(a: GramMatrix, b: GramMatrix) -> bool:
    if a.n != b.n:
        return False
    if a.pointset is None or b.pointset is None:
        return True
    return np.array_equal(a.pointset.points, b.pointset.points)


def sandwich_check(A: GramMatrix, Asig: GramMatrix, sigma: float, tau: float, q_X: float | None = None,
                   trials: int = 100, seed: int = 0, C: float = 1.0, C1: float = 1.0,
                   exact: bool = True) -> SandwichReport:
    """Check Rayleigh(A, a) <= C1^2 C^2 Rayleigh(Asig, a) on random and eigen directions.

    Directions: ``trials`` standard normal vectors from the ALPHA stream followed
    by the eigenvectors of A and of Asig.
    """
    if not _same_points(A, Asig):
        raise ValueError("A and Asig were built on different point sets")
    if q_X is None:
        q_X = A.q_X
    if q_X is None or not q_X > 0:
        raise ValueError("q_X must be positive")
    dim = A.pointset.dim if A.pointset is not None else None
    if not 0 < sigma <= 1 or (dim is not None and not sigma > dim / (2 * tau)):
        raise ValueError(f"sigma={sigma} outside (d/(2 tau), 1]")
    warnings = []
    if not exact:
        warnings.append("kernels without exact symbols: the inequality holds only up to "
                        "the supplied equivalence constants C, C1")
        log.warning(warnings[-1])
    ea, es = A.eig(), Asig.eig()
    n = A.n
    gen = rng.stream(seed, rng.ALPHA)
    alphas = [rng.normal(gen, n) for _ in range(trials)]
    alphas += list(ea.vectors.T) + list(es.vectors.T)
    factor = C1**2 * C**2
    worst = -math.inf
    ratios = []
    for al in alphas:
        ra, rs = rayleigh(A, al), rayleigh(Asig, al)
        worst = max(worst, ra / (factor * rs) - 1.0)
        ratios.append(rs / ra)
    lam_a = ea.values_ext
    lam_s = es.values_ext
    eig_viol = float(np.max(lam_a / (factor * lam_s) - 1.0))
    shape = q_X ** (-(1.0 - sigma) * 2.0 * tau)
    max_ratio = max(ratios)
    return SandwichReport(
        sigma=sigma, tau=tau, q_X=q_X,
        lower_holds=worst <= SANDWICH_RTOL,
        worst_violation=worst,
        empirical_max_ratio=max_ratio,
        empirical_min_ratio=min(ratios),
        bound_shape=shape,
        shape_ratio=max_ratio / shape,
        eigen_order_holds=eig_viol <= SANDWICH_RTOL,
        worst_eigen_violation=eig_viol,
        n_alpha=len(alphas),
        C=C, C1=C1, warnings=warnings,
    )


@dataclass(frozen=True)
class SweepLevel:
    spacing: float
    n: int
    q_X: float
    lambda_min: float
    max_ratio: float
    min_ratio: float
    naive_ratio: float
    cond_A: float
    cond_whitened: float


@dataclass(frozen=True)
class SweepResult:
    slope_lambda_min: float
    slope_max_ratio: float
    slope_naive: float
    levels: tuple

    def as_dict(self) -> dict:
        return {
            "slope_lambda_min": self.slope_lambda_min,
            "slope_max_ratio": self.slope_max_ratio,
            "slope_naive": self.slope_naive,
            "levels": [lv.__dict__ for lv in self.levels],
        }


def _sweep_level(args) -> SweepLevel:
    k_tau, k_sig, dim, h, box, policy, seed = args
    if isinstance(k_tau, str):
        k_tau, k_sig = parse_kernel(k_tau, dim), parse_kernel(k_sig, dim)
    lo, hi = box
    m = int(round((hi - lo) / h)) + 1
    ps = generate("grid", m, dim, box=box)
    A = assemble(k_tau, ps)
    S = assemble(k_sig, ps)
    ea = sym_eig(A, vectors=False)
    es = sym_eig(S, vectors=False)
    if policy == "extremes":
        ext = ratio_extremes(S, A, vectors=False)
        mx, mn = ext.max_ratio, ext.min_ratio
    elif policy == "sampled":
        sig = k_sig.tau / k_tau.tau
        rep = sandwich_check(A, S, sig, k_tau.tau, ps.q, trials=20, seed=seed)
        mx, mn = rep.empirical_max_ratio, rep.empirical_min_ratio
    else:
        raise ValueError(f"unknown alpha policy {policy!r}")
    return SweepLevel(h, ps.n, ps.q, ea.lambda_min, mx, mn, es.lambda_max / ea.lambda_min,
                      ea.cond, mx / mn)


def _slope(x, y) -> float:
    x, y = np.asarray(x, float), np.asarray(y, float)
    ok = np.isfinite(y) & (y > 0)
    if ok.sum() < 4:
        raise ValueError("fewer than 4 usable points for the exponent fit")
    return float(np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)[0])


def sweep_exponent_fit(kernel_pair, dim: int, spacings, box=(0.0, 1.0), alpha_policy: str = "extremes",
                       seed: int = 0, workers: int = 1) -> SweepResult:
    """Fit log-log slopes against q_X over grids of the given spacings.

    ``kernel_pair`` is (kernel with tau, kernel with sigma tau).  The max ratio is
    the largest alpha^T Asig alpha / alpha^T A alpha (``extremes``: exact generalised
    eigenvalue; ``sampled``: best of random and eigen directions).  The naive ratio
    is lambda_max(Asig) / lambda_min(A).
    """
    k_tau, k_sig = kernel_pair
    spacings = [float(h) for h in spacings]
    if len(spacings) < 4:
        raise ValueError("need at least 4 spacings")
    if workers > 1:
        # kernels hold closures; workers rebuild them from their ids
        jobs = [(k_tau.id, k_sig.id, dim, h, tuple(box), alpha_policy, seed) for h in spacings]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            levels = list(ex.map(_sweep_level, jobs))
    else:
        levels = [_sweep_level((k_tau, k_sig, dim, h, tuple(box), alpha_policy, seed)) for h in spacings]
    q = [lv.q_X for lv in levels]
    return SweepResult(
        slope_lambda_min=_slope(q, [lv.lambda_min for lv in levels]),
        slope_max_ratio=_slope(q, [lv.max_ratio for lv in levels]),
        slope_naive=_slope(q, [lv.naive_ratio for lv in levels]),
        levels=tuple(levels),
    )
