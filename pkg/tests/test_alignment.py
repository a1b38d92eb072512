import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kernstab.alignment import (
    band_mass,
    cross_gramian,
    figure1_experiment,
    pgm_bytes,
    write_cross_csv,
    write_pgm,
)


def orthonormal(n, seed):
    q, _ = np.linalg.qr(np.random.default_rng(seed).normal(size=(n, n)))
    return q


def test_identical_bases_give_identity():
    v = orthonormal(6, 0)
    np.testing.assert_allclose(cross_gramian(v, v).cross, np.eye(6), atol=1e-14)


def test_reversed_columns_give_anti_diagonal():
    v = orthonormal(5, 1)
    np.testing.assert_allclose(cross_gramian(v, v[:, ::-1]).cross, np.eye(5)[::-1], atol=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_random_pair_is_doubly_stochastic(seed):
    r = cross_gramian(orthonormal(15, seed), orthonormal(15, seed + 50))
    np.testing.assert_allclose(r.cross.sum(axis=0), 1, atol=1e-10)
    np.testing.assert_allclose(r.cross.sum(axis=1), 1, atol=1e-10)
    assert r.cross.min() >= 0 and r.cross.max() <= 1 + 1e-12


def test_non_orthonormal_rejected_with_pair():
    v = orthonormal(4, 2)
    bad = v.copy()
    bad[:, 2] = bad[:, 1]
    with pytest.raises(ValueError, match="<v_1, v_2>"):
        cross_gramian(v, bad)
    with pytest.raises(ValueError):
        cross_gramian(v, orthonormal(5, 0))


@given(seed=st.integers(0, 1000))
@settings(max_examples=30, deadline=None)
def test_simultaneous_permutation_equivariance(seed):
    n = 8
    va, vs = orthonormal(n, seed), orthonormal(n, seed + 1)
    perm = np.random.default_rng(seed).permutation(n)
    base = cross_gramian(va, vs).cross
    moved = cross_gramian(va[:, perm], vs[:, perm]).cross
    np.testing.assert_allclose(moved, base[np.ix_(perm, perm)], atol=1e-14)


def test_band_mass():
    assert band_mass(np.eye(5), 0) == 1.0
    assert band_mass(np.eye(5)[::-1], 1) == pytest.approx(1 / 5)


def test_cluster_aggregation_preserves_sums():
    va, vs = orthonormal(6, 3), orthonormal(6, 4)
    vals = np.array([1.0, 1.0, 1.0, 2.0, 3.0, 4.0])
    r = cross_gramian(va, vs, vals, np.arange(1.0, 7.0))
    assert r.has_clusters and r.clusters_A[0] == [0, 1, 2]
    agg = r.aggregated
    np.testing.assert_allclose(agg.sum(axis=1)[3:], 1, atol=1e-12)
    np.testing.assert_allclose(agg.sum(axis=0), 1, atol=1e-12)
    assert np.ptp(agg[:3, 0]) == 0


@pytest.mark.parametrize("dim", [1, 3])
def test_figure1_reports(dim, tmp_path):
    out = tmp_path / f"fig_d{dim}.pgm"
    r = figure1_experiment(dim, seed=0, out=out)
    assert r.cross.shape == (20, 20)
    assert r.parseval_error() <= 1e-8
    assert np.all(np.diff(r.eigenvalues_A) >= 0) and np.all(np.diff(r.eigenvalues_Asig) >= 0)
    data = out.read_bytes()
    assert data.startswith(b"P5\n20 20\n255\n") and len(data) == len(b"P5\n20 20\n255\n") + 400
    assert data == pgm_bytes(figure1_experiment(dim, seed=0))
    rows = out.with_suffix(".csv").read_text().splitlines()
    assert len(rows) == 21
    assert r.diag_band_mass(2) > r.shuffled_band_mass(2, 0)


def test_figure1_rejects_other_dims():
    with pytest.raises(ValueError):
        figure1_experiment(2)


def test_artifacts_pure_function_of_report(tmp_path):
    r = figure1_experiment(1, seed=3)
    write_pgm(r, tmp_path / "a.pgm")
    write_pgm(r, tmp_path / "b.pgm")
    write_cross_csv(r, tmp_path / "a.csv")
    write_cross_csv(r, tmp_path / "b.csv")
    assert (tmp_path / "a.pgm").read_bytes() == (tmp_path / "b.pgm").read_bytes()
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
