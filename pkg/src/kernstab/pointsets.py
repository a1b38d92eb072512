"""Finite point sets in axis-aligned boxes."""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rng

KINDS = ("grid", "uniform_random", "perturbed_grid")


@dataclass(frozen=True, eq=False)
class PointSet:
    """Pairwise distinct points, one row per point.

    ``box`` is a ``(dim, 2)`` array of per-axis lower/upper bounds.
    """

    points: np.ndarray
    box: np.ndarray
    seed: int | None = None
    _q: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        box = np.asarray(self.box, dtype=float).reshape(-1, 2)
        if box.shape[0] != pts.shape[1]:
            raise ValueError("box dimension does not match points")
        if np.any(box[:, 1] <= box[:, 0]):
            raise ValueError("degenerate box")
        tol = 1e-12 * np.max(box[:, 1] - box[:, 0])
        if np.any(pts < box[:, 0] - tol) or np.any(pts > box[:, 1] + tol):
            raise ValueError("points outside box")
        pts.flags.writeable = False
        box.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "box", box)
        if self.n >= 2 and self.q == 0.0:
            raise ValueError("points are not pairwise distinct")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def __len__(self) -> int:
        return self.n

    @property
    def diameter(self) -> float:
        """Diagonal length of the box."""
        return float(np.linalg.norm(self.box[:, 1] - self.box[:, 0]))

    @property
    def q(self) -> float:
        """Cached separation distance."""
        if not self._q:
            self._q.append(separation_distance(self))
        return self._q[0]

    def scaled(self, s: float) -> "PointSet":
        return PointSet(self.points * s, self.box * s, self.seed)

    def translated(self, shift) -> "PointSet":
        shift = np.asarray(shift, dtype=float)
        return PointSet(self.points + shift, self.box + shift[:, None], self.seed)


def pairwise_distances(points: np.ndarray) -> np.ndarray:
    """Symmetric Euclidean distance matrix; entry (i, j) computed once, then mirrored."""
    pts = np.asarray(points)
    n = pts.shape[0]
    out = np.zeros((n, n), dtype=pts.dtype)
    iu, ju = np.triu_indices(n, k=1)
    diff = pts[iu] - pts[ju]
    d = np.sqrt(np.sum(diff * diff, axis=1))
    out[iu, ju] = d
    out[ju, iu] = d
    return out


def separation_distance(ps: PointSet) -> float:
    """Minimum pairwise distance q_X (no factor 1/2)."""
    if ps.n < 2:
        raise ValueError("separation distance needs at least two points")
    pts = ps.points
    best = np.inf
    # row blocks keep memory at O(block * n)
    block = max(1, 4_000_000 // max(ps.n, 1))
    for start in range(0, ps.n - 1, block):
        rows = pts[start:start + block]
        diff = rows[:, None, :] - pts[None, start + 1:, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        # mask j <= i within the block
        idx = np.arange(rows.shape[0])[:, None]
        jdx = np.arange(d2.shape[1])[None, :]
        d2 = np.where(jdx >= idx, d2, np.inf)
        best = min(best, float(d2.min()))
    return float(np.sqrt(best))


def _normalize_box(box, dim: int) -> np.ndarray:
    b = np.asarray(box, dtype=float)
    if b.shape == (2,):
        b = np.tile(b, (dim, 1))
    b = b.reshape(dim, 2)
    if np.any(b[:, 1] <= b[:, 0]):
        raise ValueError("degenerate box")
    return b


def _grid_axes(m: int, box: np.ndarray) -> list[np.ndarray]:
    if m < 1:
        raise ValueError("grid needs at least one point per axis")
    if m == 1:
        return [np.array([0.5 * (lo + hi)]) for lo, hi in box]
    return [lo + (hi - lo) * np.arange(m) / (m - 1) for lo, hi in box]


def generate(kind: str, count: int, dim: int, box=(0.0, 1.0), seed: int | None = 0) -> PointSet:
    """Generate a point set.

    Parameters
    ----------
    kind : {"grid", "uniform_random", "perturbed_grid"}
    count : int
        Points per axis for the grid kinds, total points for ``uniform_random``.
    dim : int
    box : pair or (dim, 2) array
        Per-axis bounds; a single pair is used for every axis.
    seed : int
        Seed for the random kinds (Philox stream ``rng.POINTS``).
    """
    if kind not in KINDS:
        raise ValueError(f"unknown point set kind {kind!r}")
    if dim < 1:
        raise ValueError("dim must be positive")
    b = _normalize_box(box, dim)
    if kind == "uniform_random":
        if count < 1:
            raise ValueError("need at least one point")
        gen = rng.stream(seed or 0, rng.POINTS)
        lo, width = b[:, 0], b[:, 1] - b[:, 0]
        tol = 1e-12 * float(np.linalg.norm(width))
        pts = lo + width * gen.random((count, dim))
        while count > 1:
            d = pairwise_distances(pts)
            np.fill_diagonal(d, np.inf)
            bad = np.argwhere(np.triu(d < tol, k=1))
            if bad.size == 0:
                break
            for j in np.unique(bad[:, 1]):
                pts[j] = lo + width * gen.random(dim)
        return PointSet(pts, b, seed)

    axes = _grid_axes(count, b)
    pts = np.array(list(itertools.product(*axes)), dtype=float).reshape(-1, dim)
    if kind == "perturbed_grid":
        gen = rng.stream(seed or 0, rng.POINTS)
        spacing = (b[:, 1] - b[:, 0]) / max(count - 1, 1)
        jitter = (2.0 * gen.random(pts.shape) - 1.0) * 0.25 * spacing
        pts = np.clip(pts + jitter, b[:, 0], b[:, 1])
        return PointSet(pts, b, seed)
    return PointSet(pts, b, None)


def write_csv(ps: PointSet, path) -> None:
    """One point per row, columns x0..x{d-1}, 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"x{i}" for i in range(ps.dim)])
        for p in ps.points:
            w.writerow([format(float(v), ".17g") for v in p])


def read_csv(path, box=None) -> PointSet:
    """Read points written by :func:`write_csv`; the box defaults to the bounding box."""
    with open(Path(path), newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty point file")
    body = rows[1:] if rows[0] and rows[0][0].startswith("x") else rows
    pts = np.array([[float(v) for v in r] for r in body if r], dtype=float)
    if box is None:
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        pad = np.where(hi > lo, 0.0, 0.5)
        box = np.stack([lo - pad, hi + pad], axis=1)
    else:
        box = _normalize_box(box, pts.shape[1])
    return PointSet(pts, box)
