"""Eigenvector cross-Gramians between kernel matrices of different smoothness.

``cross[i, j] = <v_i, w_j>^2`` for orthonormal eigenbases (v_i) of A and
(w_j) of A^(sigma), both in ascending eigenvalue order.  Rows and columns sum
to one, so the matrix is doubly stochastic.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rng
from .gram import assemble, sym_eig
from .kernels import make_matern
from .pointsets import PointSet, generate

ORTHO_TOL = 1e-10
CLUSTER_RTOL = 1e-10


def _check_orthonormal(V: np.ndarray, name: str) -> None:
    G = V.T @ V - np.eye(V.shape[1])
    bad = np.argwhere(np.abs(G) > ORTHO_TOL)
    if bad.size:
        i, j = (int(t) for t in bad[0])
        raise ValueError(f"{name} not orthonormal: <v_{i}, v_{j}> deviates by {G[i, j]:.3e}")


def _clusters(values: np.ndarray | None, n: int) -> list[list[int]]:
    """Runs of ascending eigenvalues whose consecutive gaps are < CLUSTER_RTOL * lambda_max."""
    if values is None:
        return [[i] for i in range(n)]
    tol = CLUSTER_RTOL * float(np.max(np.abs(values)))
    groups = [[0]]
    for i in range(1, n):
        if values[i] - values[i - 1] < tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _aggregate(cross: np.ndarray, rows: list[list[int]], cols: list[list[int]]) -> np.ndarray:
    """Spread each cluster-by-cluster block's mass evenly over the block."""
    out = cross.copy()
    for r in rows:
        for c in cols:
            if len(r) == 1 and len(c) == 1:
                continue
            block = np.ix_(r, c)
            out[block] = cross[block].sum() / (len(r) * len(c))
    return out


def band_mass(m: np.ndarray, width: int) -> float:
    """sum_{|i-j| <= width} m[i, j] / n."""
    n = m.shape[0]
    i, j = np.indices(m.shape)
    return float(m[np.abs(i - j) <= width].sum() / n)


@dataclass
class AlignmentReport:
    n: int
    eigenvalues_A: np.ndarray
    eigenvalues_Asig: np.ndarray
    cross: np.ndarray
    clusters_A: list = field(default_factory=list)
    clusters_Asig: list = field(default_factory=list)

    @property
    def has_clusters(self) -> bool:
        return any(len(c) > 1 for c in self.clusters_A + self.clusters_Asig)

    @property
    def aggregated(self) -> np.ndarray:
        if not self.has_clusters:
            return self.cross
        return _aggregate(self.cross, self.clusters_A, self.clusters_Asig)

    def diag_band_mass(self, width: int) -> float:
        return band_mass(self.aggregated, width)

    def shuffled_band_mass(self, width: int, seed: int) -> float:
        """Band mass after permuting columns with the SHUFFLE stream of ``seed``."""
        perm = rng.permutation(rng.stream(seed, rng.SHUFFLE), self.n)
        return band_mass(self.aggregated[:, perm], width)

    def parseval_error(self) -> float:
        return float(max(np.max(np.abs(self.cross.sum(axis=0) - 1.0)),
                         np.max(np.abs(self.cross.sum(axis=1) - 1.0))))


def cross_gramian(VA, VS, eigenvalues_A=None, eigenvalues_Asig=None) -> AlignmentReport:
    """Squared inner products of two orthonormal bases (columns)."""
    VA = np.asarray(VA, dtype=float)
    VS = np.asarray(VS, dtype=float)
    if VA.ndim != 2 or VA.shape[0] != VA.shape[1] or VA.shape != VS.shape:
        raise ValueError("bases must be square and of equal size")
    _check_orthonormal(VA, "VA")
    _check_orthonormal(VS, "VS")
    n = VA.shape[0]
    cross = (VA.T @ VS) ** 2
    ea = None if eigenvalues_A is None else np.asarray(eigenvalues_A, dtype=float)
    es = None if eigenvalues_Asig is None else np.asarray(eigenvalues_Asig, dtype=float)
    return AlignmentReport(
        n=n,
        eigenvalues_A=ea if ea is not None else np.full(n, np.nan),
        eigenvalues_Asig=es if es is not None else np.full(n, np.nan),
        cross=cross,
        clusters_A=_clusters(ea, n),
        clusters_Asig=_clusters(es, n),
    )


def alignment_experiment(ps: PointSet, kernel, kernel_sig) -> AlignmentReport:
    ea = sym_eig(assemble(kernel, ps))
    es = sym_eig(assemble(kernel_sig, ps))
    return cross_gramian(ea.vectors, es.vectors, ea.values, es.values)


def figure1_experiment(dim: int, seed: int = 0, n: int = 20, out=None) -> AlignmentReport:
    """Quadratic against basic Matern on ``n`` uniform points in [0, 1]^dim.

    With ``out`` set, writes the PGM heatmap there and the matrix next to it as CSV.
    """
    if dim not in (1, 3):
        raise ValueError("the alignment experiment is defined for dim 1 and 3")
    ps = generate("uniform_random", n, dim, seed=seed)
    report = alignment_experiment(ps, make_matern("quadratic", dim), make_matern("basic", dim))
    if out is not None:
        write_pgm(report, out)
        write_cross_csv(report, Path(out).with_suffix(".csv"))
    return report


def pgm_bytes(report: AlignmentReport) -> bytes:
    """Binary PGM (P5, maxval 255), grey = round(255 cross[i, j]), row i top to bottom."""
    pix = np.rint(255.0 * np.clip(report.cross, 0.0, 1.0)).astype(np.uint8)
    header = f"P5\n{report.n} {report.n}\n255\n".encode("ascii")
    return header + pix.tobytes()


def write_pgm(report: AlignmentReport, path) -> None:
    Path(path).write_bytes(pgm_bytes(report))


def write_cross_csv(report: AlignmentReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"j{j}" for j in range(report.n)])
        for row in report.cross:
            w.writerow([format(float(v), ".17g") for v in row])
