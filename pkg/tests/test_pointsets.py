import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.distance import pdist

from kernstab.pointsets import (
    PointSet,
    generate,
    pairwise_distances,
    read_csv,
    separation_distance,
    write_csv,
)


def test_grid_layout():
    ps = generate("grid", 5, 2, box=(0, 2))
    assert ps.n == 25 and ps.dim == 2
    assert ps.q == pytest.approx(0.5)
    assert ps.diameter == pytest.approx(2 * np.sqrt(2))


def test_random_is_seeded_and_inside_box():
    a = generate("uniform_random", 30, 3, box=(-1, 2), seed=4)
    b = generate("uniform_random", 30, 3, box=(-1, 2), seed=4)
    np.testing.assert_array_equal(a.points, b.points)
    assert np.all(a.points >= -1) and np.all(a.points <= 2)
    assert not np.array_equal(a.points, generate("uniform_random", 30, 3, box=(-1, 2), seed=5).points)


def test_perturbed_grid_stays_near_grid():
    base = generate("grid", 6, 1)
    pert = generate("perturbed_grid", 6, 1, seed=2)
    assert np.max(np.abs(pert.points - base.points)) <= 0.25 * 0.2 + 1e-15
    assert pert.q >= 0.5 * 0.2 - 1e-15


@pytest.mark.parametrize("seed", range(5))
def test_separation_matches_brute_force(seed):
    ps = generate("uniform_random", 300, 2, seed=seed)
    assert ps.q == pytest.approx(pdist(ps.points).min(), rel=1e-15)
    assert separation_distance(ps) == ps.q


def test_pairwise_distances_symmetric_and_extended():
    pts = np.random.default_rng(0).random((7, 3))
    d = pairwise_distances(pts)
    np.testing.assert_array_equal(d, d.T)
    np.testing.assert_allclose(d[np.triu_indices(7, 1)], pdist(pts), rtol=1e-15)
    assert pairwise_distances(pts.astype(np.longdouble)).dtype == np.longdouble


@given(shift=st.floats(-5, 5), scale=st.floats(0.1, 10), seed=st.integers(0, 1000))
@settings(max_examples=50, deadline=None)
def test_q_translation_invariant_and_homogeneous(shift, scale, seed):
    ps = generate("uniform_random", 12, 2, seed=seed)
    assert ps.translated([shift, shift]).q == pytest.approx(ps.q, rel=1e-9)
    assert ps.scaled(scale).q == pytest.approx(scale * ps.q, rel=1e-12)


def test_validation():
    with pytest.raises(ValueError):
        PointSet(np.array([[2.0]]), np.array([[0.0, 1.0]]))
    with pytest.raises(ValueError):
        generate("sobol", 3, 1)
    with pytest.raises(ValueError):
        generate("grid", 3, 1, box=(1, 0))
    with pytest.raises(ValueError):
        separation_distance(generate("grid", 1, 1))
    with pytest.raises(ValueError):
        PointSet(np.array([[0.5], [0.5]]), np.array([[0.0, 1.0]]))


def test_points_are_read_only():
    ps = generate("grid", 3, 1)
    with pytest.raises(ValueError):
        ps.points[0, 0] = 1.0


def test_csv_round_trip(tmp_path):
    ps = generate("uniform_random", 9, 3, seed=11)
    path = tmp_path / "pts.csv"
    write_csv(ps, path)
    back = read_csv(path, box=(0, 1))
    np.testing.assert_array_equal(back.points, ps.points)
    assert path.read_text().splitlines()[0] == "x0,x1,x2"
