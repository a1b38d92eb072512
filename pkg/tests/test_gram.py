import os
import subprocess
import sys

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from kernstab import _core_py, gram
from kernstab._backend import COMPILED, core
from kernstab.gram import (
    CholeskyError,
    ConvergenceError,
    GramMatrix,
    assemble,
    cholesky,
    cond_whitened,
    ratio_extremes,
    rayleigh,
    sym_eig,
    whiten,
    write_matrix_csv,
)
from kernstab.kernels import make_matern, make_sobolev
from kernstab.pointsets import generate


def random_spd(n, seed, spread=1e3):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    w = np.geomspace(1.0, spread, n)
    return (q * w) @ q.T


def test_assemble_entries():
    ps = generate("grid", 4, 1)
    k = make_sobolev(1.0, 1)
    A = assemble(k, ps)
    d = np.abs(ps.points[:, 0][:, None] - ps.points[:, 0][None, :])
    np.testing.assert_allclose(A.entries, k.profile(d), rtol=1e-15)
    assert A.extended.dtype == np.longdouble
    np.testing.assert_array_equal(A.extended, A.extended.T)
    assert A.q_X == pytest.approx(1 / 3)


def test_assemble_dimension_mismatch():
    with pytest.raises(ValueError):
        assemble(make_sobolev(1.0, 1), generate("grid", 3, 2))


@pytest.mark.parametrize("seed", range(4))
def test_sym_eig_matches_lapack(seed):
    a = random_spd(12, seed)
    res = sym_eig(a)
    np.testing.assert_allclose(res.values, np.linalg.eigvalsh(a), rtol=1e-12)
    v = res.vectors
    np.testing.assert_allclose(v.T @ v, np.eye(12), atol=1e-13)
    np.testing.assert_allclose(v @ np.diag(res.values) @ v.T, a, atol=1e-11 * np.abs(a).max())
    assert np.all(np.diff(res.values) >= 0)


def test_sym_eig_sign_convention():
    res = sym_eig(random_spd(8, 3))
    idx = np.argmax(np.abs(res.vectors), axis=0)
    assert np.all(res.vectors[idx, np.arange(8)] > 0)


@given(seed=st.integers(0, 10_000), n=st.integers(1, 15))
@settings(max_examples=40, deadline=None)
def test_trace_and_determinant(seed, n):
    rng = np.random.default_rng(seed)
    b = rng.normal(size=(n, n))
    a = b + b.T
    w = sym_eig(a, vectors=False).values
    assert w.sum() == pytest.approx(np.trace(a), abs=1e-11 * max(1, np.abs(a).sum()))
    sign, logdet = np.linalg.slogdet(a)
    if sign != 0 and np.min(np.abs(w)) > 1e-8:
        assert np.prod(np.sign(w)) == sign
        assert np.sum(np.log(np.abs(w))) == pytest.approx(logdet, abs=1e-8)


def test_extended_precision_resolves_ill_conditioned_gram():
    # tau = 3 on a grid with spacing 1/128: condition number around 1e15
    ps = generate("grid", 129, 1)
    A = assemble(make_sobolev(3.0, 1), ps)
    res = sym_eig(A, vectors=False)
    # Gershgorin-free check: Rayleigh quotient of the computed extreme vectors
    full = sym_eig(A)
    assert rayleigh(A, full.vectors[:, 0]) == pytest.approx(res.lambda_min, rel=1e-6)
    assert res.lambda_min > 0


def test_asymmetric_rejected():
    a = np.eye(3)
    a[0, 1] = 1.0
    with pytest.raises(ValueError):
        sym_eig(a)


def test_convergence_error(monkeypatch):
    monkeypatch.setattr(gram, "MAX_SWEEPS", 1)
    with pytest.raises(ConvergenceError) as err:
        sym_eig(random_spd(10, 1))
    assert err.value.sweeps == 1


def test_cholesky_and_whiten():
    a, b = random_spd(9, 0), random_spd(9, 1)
    lower = cholesky(a)
    np.testing.assert_allclose((lower @ lower.T).astype(float), a, rtol=1e-13, atol=1e-12)
    assert np.all(np.triu(lower, 1) == 0)
    w = whiten(b, lower).astype(float)
    li = np.linalg.inv(lower.astype(float))
    np.testing.assert_allclose(w, li @ b @ li.T, rtol=1e-9, atol=1e-9)


def test_cholesky_rejects_indefinite():
    with pytest.raises(CholeskyError) as err:
        cholesky(np.diag([1.0, -1.0, 2.0]))
    assert err.value.pivot == 1


@pytest.mark.parametrize("seed", range(3))
def test_ratio_extremes_match_generalized_eigh(seed):
    a, b = random_spd(10, seed), random_spd(10, seed + 100)
    mn, mx, vmin, vmax = ratio_extremes(b, a)
    w = sla.eigh(b, a, eigvals_only=True)
    assert mn == pytest.approx(w[0], rel=1e-10)
    assert mx == pytest.approx(w[-1], rel=1e-10)
    assert (vmin @ b @ vmin) / (vmin @ a @ vmin) == pytest.approx(mn, rel=1e-10)
    assert (vmax @ b @ vmax) / (vmax @ a @ vmax) == pytest.approx(mx, rel=1e-10)
    # brute force: no random direction beats the extremes
    rng = np.random.default_rng(seed)
    for x in rng.normal(size=(200, 10)):
        r = (x @ b @ x) / (x @ a @ x)
        assert mn * (1 - 1e-12) <= r <= mx * (1 + 1e-12)
    assert cond_whitened(a, b) == pytest.approx(mx / mn, rel=1e-12)


def test_rayleigh_checks():
    with pytest.raises(ValueError):
        rayleigh(np.eye(2), [0.0, 0.0])
    with pytest.raises(ValueError):
        rayleigh(np.eye(2), [1.0])
    assert rayleigh(np.diag([1.0, 3.0]), [0.0, 2.0]) == 3.0


def test_gram_matrix_caching_and_scaling():
    A = assemble(make_matern("basic", 1), generate("grid", 6, 1))
    assert A.eig() is A.eig()
    np.testing.assert_allclose(A.scaled(2.0).eig().values, 2 * A.eig().values, rtol=1e-14)
    with pytest.raises(ValueError):
        GramMatrix(np.zeros((2, 3)))


def test_matrix_csv(tmp_path):
    path = tmp_path / "m.csv"
    write_matrix_csv(np.array([[1.0, 0.1], [0.1, 1.0 / 3]]), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "c0,c1"
    assert float(lines[2].split(",")[1]) == 1.0 / 3


@pytest.mark.skipif(not COMPILED, reason="compiled core not built")
def test_compiled_core_matches_fallback():
    a = np.array(random_spd(14, 5, 1e6), dtype=np.longdouble)
    results = []
    for mod in (core, _core_py):
        m = a.copy()
        v = np.eye(14, dtype=np.longdouble)
        mod.jacobi_eigh(m, v, np.longdouble(1e-18), np.longdouble(0), 100)
        lower = a.copy()
        assert mod.cholesky(lower) == -1
        b = np.array(np.random.default_rng(0).normal(size=(14, 3)), dtype=np.longdouble)
        mod.forward_solve(lower, b)
        c = b.copy()
        mod.back_solve_t(lower, c)
        results.append((np.sort(np.diag(m)), lower, b, c))
    for x, y in zip(*results):
        np.testing.assert_allclose(x.astype(float), y.astype(float), rtol=1e-15, atol=1e-15)


def test_pure_fallback_selected_by_environment():
    code = ("from kernstab import _backend, sym_eig, assemble, generate, make_sobolev;"
            "A = assemble(make_sobolev(2.0, 1), generate('grid', 17, 1));"
            "print(_backend.NAME, repr(sym_eig(A, vectors=False).lambda_min))")
    env = dict(os.environ, KERNSTAB_PURE="1")
    res = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env)
    name, value = res.stdout.split()
    assert name == "numpy"
    expected = sym_eig(assemble(make_sobolev(2.0, 1), generate("grid", 17, 1)), vectors=False).lambda_min
    assert float(value) == pytest.approx(expected, rel=1e-13)
