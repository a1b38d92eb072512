"""Kernel matrices and dense symmetric linear algebra.

Matrices are assembled in extended precision (``np.longdouble``) and the
eigensolver, Cholesky factorisation and whitening all run in extended
precision through :mod:`kernstab._backend`.  Results are handed back as
float64.  Extended precision matters: Gram matrices of smooth kernels on
fine grids reach condition numbers near 1e17, beyond what double precision
eigensolvers resolve.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from ._backend import core
from .kernels import RadialKernel
from .pointsets import PointSet, pairwise_distances

MAX_SWEEPS = 100
# rotate (p, q) unless |a_pq| <= REL_TOL * sqrt(|a_pp a_qq|)
REL_TOL = 1e-18
OFF_TOL = 1e-14


class ConvergenceError(RuntimeError):
    def __init__(self, sweeps: int, residual: float):
        super().__init__(f"Jacobi did not converge in {sweeps} sweeps (off-diagonal norm {residual:.3e})")
        self.sweeps = sweeps
        self.residual = residual


class CholeskyError(np.linalg.LinAlgError):
    """Cholesky factorisation hit a non-positive pivot."""

    def __init__(self, pivot: int):
        super().__init__(f"matrix not numerically positive definite (pivot {pivot})")
        self.pivot = pivot


@dataclass(eq=False)
class GramMatrix:
    """Symmetric kernel matrix ``k(X, X)``.

    ``entries`` is the float64 view; ``extended`` holds the same matrix in
    extended precision and is what the solvers consume.
    """

    extended: np.ndarray
    kernel_id: str = "matrix"
    pointset: PointSet | None = None
    q_X: float | None = None
    _eig: object = field(default=None, repr=False)

    def __post_init__(self):
        ext = np.ascontiguousarray(self.extended, dtype=np.longdouble)
        if ext.ndim != 2 or ext.shape[0] != ext.shape[1]:
            raise ValueError("Gram matrix must be square")
        self.extended = ext
        self.entries = ext.astype(float)

    @property
    def n(self) -> int:
        return self.extended.shape[0]

    @classmethod
    def from_array(cls, a, kernel_id: str = "matrix") -> "GramMatrix":
        a = np.asarray(a)
        if a.dtype != np.longdouble:
            a = a.astype(np.longdouble)
        return cls(a, kernel_id=kernel_id)

    def eig(self) -> "EigResult":
        if self._eig is None:
            self._eig = sym_eig(self)
        return self._eig

    def scaled(self, c: float) -> "GramMatrix":
        return GramMatrix(self.extended * np.longdouble(c), self.kernel_id, self.pointset, self.q_X)


def _as_gram(a) -> GramMatrix:
    return a if isinstance(a, GramMatrix) else GramMatrix.from_array(a)


def assemble(kernel: RadialKernel, ps: PointSet) -> GramMatrix:
    """entries[i, j] = profile(|x_i - x_j|), each pair evaluated once."""
    if kernel.dim != ps.dim:
        raise ValueError(f"kernel dim {kernel.dim} != point set dim {ps.dim}")
    n = ps.n
    dist = pairwise_distances(ps.points.astype(np.longdouble))
    iu, ju = np.triu_indices(n, k=1)
    out = np.empty((n, n), dtype=np.longdouble)
    vals = np.asarray(kernel.profile(dist[iu, ju]), dtype=np.longdouble)
    out[iu, ju] = vals
    out[ju, iu] = vals
    out[np.diag_indices(n)] = np.asarray(kernel.profile(np.zeros(1, dtype=np.longdouble)),
                                         dtype=np.longdouble)[0]
    q = ps.q if n >= 2 else None
    return GramMatrix(out, kernel_id=kernel.id, pointset=ps, q_X=q)


@dataclass(frozen=True)
class EigResult:
    """Ascending eigenvalues and matching orthonormal eigenvectors (columns)."""

    values: np.ndarray
    vectors: np.ndarray
    sweeps: int
    values_ext: np.ndarray = field(repr=False, default=None)

    @property
    def lambda_min(self) -> float:
        return float(self.values[0])

    @property
    def lambda_max(self) -> float:
        return float(self.values[-1])

    @property
    def cond(self) -> float:
        return float(self.values_ext[-1] / self.values_ext[0])


def _jacobi(ext: np.ndarray, vectors: bool = True):
    a = np.array(ext, dtype=np.longdouble, order="C", copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=np.longdouble) if vectors else np.zeros((0, n), dtype=np.longdouble)
    frob = np.sqrt(np.sum(a * a))
    floor = np.longdouble(1e-40) * frob
    sweeps, last = core.jacobi_eigh(a, v, np.longdouble(REL_TOL), floor, MAX_SWEEPS)
    if last:
        off = a - np.diag(np.diag(a))
        resid = float(np.sqrt(np.sum(off * off)))
        if resid > OFF_TOL * float(frob):
            raise ConvergenceError(sweeps, resid)
    return np.diag(a).copy(), v, sweeps


def sym_eig(a, vectors: bool = True) -> EigResult:
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi.

    Eigenvalues ascend; each eigenvector's largest-magnitude component is
    made positive (first such component on ties).
    """
    g = _as_gram(a)
    ext = g.extended
    if not np.array_equal(ext, ext.T):
        asym = float(np.max(np.abs(ext - ext.T)))
        if asym > 1e-12 * float(np.max(np.abs(ext))):
            raise ValueError(f"matrix not symmetric (max asymmetry {asym:.3e})")
        ext = (ext + ext.T) / 2
    w, v, sweeps = _jacobi(ext, vectors)
    order = np.argsort(w, kind="stable")
    w = w[order]
    if vectors:
        v = v[:, order]
        idx = np.argmax(np.abs(v), axis=0)
        signs = np.sign(v[idx, np.arange(v.shape[1])])
        signs[signs == 0] = 1
        v = v * signs
        vecs = v.astype(float)
    else:
        vecs = np.empty((ext.shape[0], 0))
    return EigResult(w.astype(float), vecs, sweeps, values_ext=w)


def rayleigh(a, alpha) -> float:
    """alpha^T A alpha / |alpha|^2, accumulated in extended precision."""
    g = _as_gram(a)
    al = np.asarray(alpha, dtype=np.longdouble)
    if al.shape != (g.n,):
        raise ValueError("alpha has wrong length")
    nrm = al @ al
    if nrm == 0:
        raise ValueError("alpha must be nonzero")
    return float((al @ g.extended @ al) / nrm)


def quadratic_form(a, alpha) -> float:
    g = _as_gram(a)
    al = np.asarray(alpha, dtype=np.longdouble)
    return float(al @ g.extended @ al)


def cholesky(a) -> np.ndarray:
    """Lower factor L with A = L L^T (extended precision)."""
    g = _as_gram(a)
    lower = np.array(g.extended, dtype=np.longdouble, order="C", copy=True)
    pivot = core.cholesky(lower)
    if pivot >= 0:
        raise CholeskyError(int(pivot))
    return lower


def whiten(b, lower: np.ndarray) -> np.ndarray:
    """L^{-1} B L^{-T} for a lower Cholesky factor L, symmetrised."""
    y = np.array(_as_gram(b).extended, dtype=np.longdouble, order="C", copy=True)
    core.forward_solve(lower, y)
    z = np.ascontiguousarray(y.T)
    core.forward_solve(lower, z)
    return (z + z.T) / 2


@dataclass(frozen=True)
class RatioExtremes:
    """Extremes of alpha^T B alpha / alpha^T A alpha and unit vectors attaining them."""

    min_ratio: float
    max_ratio: float
    argmin: np.ndarray
    argmax: np.ndarray

    def __iter__(self):
        return iter((self.min_ratio, self.max_ratio, self.argmin, self.argmax))


def ratio_extremes(b, a, vectors: bool = True) -> RatioExtremes:
    """Generalised eigen-extremes of (B, A) through Cholesky whitening of A.

    With ``vectors=False`` the argmin/argmax fields are empty arrays.
    """
    ga, gb = _as_gram(a), _as_gram(b)
    if ga.n != gb.n:
        raise ValueError("matrices differ in size")
    lower = cholesky(ga)
    res = sym_eig(GramMatrix(whiten(gb, lower)), vectors=vectors)
    if not vectors:
        return RatioExtremes(res.lambda_min, res.lambda_max, np.empty(0), np.empty(0))
    ends = np.ascontiguousarray(res.vectors[:, [0, -1]].astype(np.longdouble))
    core.back_solve_t(lower, ends)
    ends = ends.astype(float)
    ends /= np.linalg.norm(ends, axis=0)
    return RatioExtremes(res.lambda_min, res.lambda_max, ends[:, 0], ends[:, 1])


def cond_whitened(a, b) -> float:
    """cond(A^{-1/2} B A^{-1/2}) = max ratio / min ratio."""
    r = ratio_extremes(b, a, vectors=False)
    return r.max_ratio / r.min_ratio


def write_matrix_csv(m, path) -> None:
    """Row-major CSV with header ``c0,c1,...`` and 17 significant digits."""
    arr = np.asarray(m.entries if isinstance(m, GramMatrix) else m, dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"c{j}" for j in range(arr.shape[1])])
        for row in arr:
            w.writerow([format(float(v), ".17g") for v in row])
