"""Stability of kernel matrices: Ingham-type bounds, smallest eigenvalues and
cross-smoothness comparisons for radial kernels in dimensions 1 to 4."""

__version__ = "0.1.0"

from ._backend import NAME as BACKEND  # noqa: E402
from .gram import GramMatrix, assemble, ratio_extremes, rayleigh, sym_eig  # noqa: E402
from .ingham import (  # noqa: E402
    InghamConstants,
    exp_sum_ball_integral,
    ingham_constants,
    localization_ratio,
    verify_ingham,
)
from .kernels import RadialKernel, make_gaussian, make_matern, make_sobolev, make_wendland_3_0, parse_kernel  # noqa: E402
from .pointsets import PointSet, generate  # noqa: E402

__all__ = [
    "BACKEND",
    "GramMatrix",
    "InghamConstants",
    "PointSet",
    "RadialKernel",
    "assemble",
    "exp_sum_ball_integral",
    "generate",
    "ingham_constants",
    "localization_ratio",
    "make_gaussian",
    "make_matern",
    "make_sobolev",
    "make_wendland_3_0",
    "parse_kernel",
    "ratio_extremes",
    "rayleigh",
    "sym_eig",
    "verify_ingham",
    "__version__",
]
