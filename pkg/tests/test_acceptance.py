"""Acceptance criteria 1-9, each at its stated tolerance and time budget.

Every test records one ``PASS``/``FAIL`` line, repeated in the pytest
terminal summary; ``python tests/test_acceptance.py`` prints them directly.
"""

import math
import time

import numpy as np
import pytest

from kernstab import rng
from kernstab.alignment import figure1_experiment, pgm_bytes
from kernstab.gram import assemble, sym_eig
from kernstab.ingham import (
    compute_beta,
    dirichlet_lambda_min,
    exp_sum_ball_integral,
    ingham_constants,
    localization_profile,
    localization_radius,
    verify_ingham,
)
from kernstab.kernels import ball_volume, make_sobolev
from kernstab.pointsets import generate
from kernstab.stability import (
    lambda_min_lower_gaussian,
    lambda_min_lower_general,
    lambda_min_lower_sobolev,
    sandwich_check,
    sweep_exponent_fit,
)

from corpus import corpus


def test_criterion_1_dirichlet_eigenvalues(record_acceptance):
    t0 = time.perf_counter()
    expected = {1: (9.8696, 1e-3), 2: (23.132, 5e-3), 3: (39.478, 1e-3), 4: (58.727, 5e-3)}
    got = {d: dirichlet_lambda_min(d) for d in expected}
    elapsed = time.perf_counter() - t0
    ok = all(abs(got[d] - v) <= tol for d, (v, tol) in expected.items()) and elapsed < 1.0
    detail = ", ".join(f"d={d}: {got[d]:.6f}" for d in got)
    record_acceptance(1, ok, f"{detail} ({elapsed:.3f} s)")
    assert ok


def test_criterion_2_asymptotic_range(record_acceptance):
    t0 = time.perf_counter()
    lam = {d: dirichlet_lambda_min(d) for d in (3, 4)}
    elapsed = time.perf_counter() - t0
    ok = all(d * d - 4 < lam[d] < 2 * d * (d + 4) for d in lam) and elapsed < 1.0
    record_acceptance(2, ok, ", ".join(f"{d * d - 4} < {lam[d]:.4f} < {2 * d * (d + 4)}" for d in lam))
    assert ok


def test_criterion_3_constant_self_consistency(record_acceptance):
    worst = 0.0
    for d in (1, 2, 3, 4):
        c = ingham_constants(d)
        lam = c.lambda_min_dirichlet
        worst = max(worst,
                    abs(c.c0 - math.sqrt(2) * math.sqrt(lam)) / c.c0,
                    abs(c.c1 - math.pi ** (d / 2) / (2 * lam ** (d / 2))) / c.c1,
                    abs(c.c2 - (2 / math.pi) ** (d / 2) / c.beta) / c.c2)
    c1_err = abs(ingham_constants(1).c1 - 1 / (2 * math.sqrt(math.pi)))
    h_err = abs(compute_beta(1).h_min - 1 / (2 * math.sqrt(math.pi)))
    ok = worst <= 1e-10 and c1_err <= 1e-10 and h_err <= 1e-8
    record_acceptance(3, ok, f"closed forms rel err {worst:.2e}, c1(d=1) err {c1_err:.2e}, "
                             f"h(pi) err {h_err:.2e}")
    assert ok


def _monte_carlo_ball(ps, alpha, R, samples, seed):
    gen = rng.stream(seed, rng.MONTE_CARLO)
    d = ps.dim
    direction = rng.normal(gen, (samples, d))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = R * rng.uniform(gen, samples) ** (1.0 / d)
    w = direction * radius[:, None]
    s = np.exp(1j * (w @ ps.points.T)) @ alpha
    f = np.abs(s) ** 2
    vol = ball_volume(d, R)
    return vol * f.mean(), vol * f.std(ddof=1) / math.sqrt(samples)


def test_criterion_4_ingham_sandwich(record_acceptance):
    t0 = time.perf_counter()
    worst = math.inf
    checks = 0
    for d in (1, 2):
        consts = ingham_constants(d)
        for cfg in range(100):
            seed = 400 + 1000 * d + cfg
            gen = rng.stream(seed, rng.POINTS)
            n = int(gen.integers(2, 9))
            ps = generate("uniform_random", n, d, seed=seed)
            ag = rng.stream(seed, rng.ALPHA)
            alphas = [rng.normal(ag, n) for _ in range(5)] + list(np.eye(n))
            for al in alphas:
                for mode in ("lower", "upper"):
                    worst = min(worst, verify_ingham(ps, al, consts, mode).margin)
                    checks += 1
    mc_ok = 0
    for spot in range(10):
        d = 1 + spot % 2
        ps = generate("uniform_random", 5, d, seed=7000 + spot)
        al = rng.normal(rng.stream(7000 + spot, rng.ALPHA), 5)
        R = ingham_constants(d).c0 / ps.q if spot % 2 else math.pi / ps.q
        exact = exp_sum_ball_integral(ps, al, R)
        est, se = _monte_carlo_ball(ps, al, R, 10**6, 7000 + spot)
        mc_ok += abs(est - exact) <= 4 * se
    elapsed = time.perf_counter() - t0
    ok = worst >= -1e-9 and mc_ok == 10 and elapsed < 60
    record_acceptance(4, ok, f"{checks} checks, worst margin {worst:.3e}, "
                             f"Monte Carlo {mc_ok}/10 within 4 SE ({elapsed:.1f} s)")
    assert ok


def test_criterion_5_eigenvalue_lower_bounds(record_acceptance):
    t0 = time.perf_counter()
    consts = {d: ingham_constants(d) for d in (1, 2, 3)}
    violations = {}
    slack = {}
    for bound in ("general", "sobolev", "gaussian"):
        violations[bound] = 0
        slack[bound] = math.inf
        for kernel, ps in corpus(bound):
            lam = sym_eig(assemble(kernel, ps), vectors=False).lambda_min
            c = consts[ps.dim]
            if bound == "general":
                values = [lambda_min_lower_general(kernel, ps.q, c)]
            elif bound == "sobolev":
                values = [lambda_min_lower_sobolev(kernel.tau, ps.dim, ps.q, kernel.c_lower, c)]
            else:
                g = kernel.params["gamma"]
                values = [lambda_min_lower_gaussian(g, ps.dim, ps.q, c, "basic")]
                if ps.dim >= 3:
                    values.append(lambda_min_lower_gaussian(g, ps.dim, ps.q, c, "improved"))
            for v in values:
                violations[bound] += v > lam * (1 + 1e-9)
                slack[bound] = min(slack[bound], lam / v)
    elapsed = time.perf_counter() - t0
    ok = sum(violations.values()) == 0 and elapsed < 120
    detail = ", ".join(f"{b}: {violations[b]} violations, min slack {slack[b]:.3g}" for b in violations)
    record_acceptance(5, ok, f"{detail} ({elapsed:.1f} s)")
    assert ok


def test_criterion_6_sandwich_lower_half(record_acceptance):
    ps = generate("grid", 20, 1)
    A = assemble(make_sobolev(2.0, 1), ps)
    S = assemble(make_sobolev(1.0, 1), ps)
    rep = sandwich_check(A, S, 0.5, 2.0, ps.q, trials=100, seed=6)
    ok = rep.n_alpha == 140 and rep.lower_holds and rep.eigen_order_holds
    record_acceptance(6, ok, f"{rep.n_alpha} directions, worst violation {rep.worst_violation:.3e}, "
                             f"eigen ordering worst {rep.worst_eigen_violation:.3e}")
    assert ok


def test_criterion_7_scaling_shapes(record_acceptance):
    t0 = time.perf_counter()
    res = sweep_exponent_fit((make_sobolev(3.0, 1), make_sobolev(1.0, 1)), 1,
                             [2.0**-k for k in range(3, 9)])
    elapsed = time.perf_counter() - t0
    ok = (abs(res.slope_lambda_min - 5) <= 0.5
          and abs(res.slope_max_ratio + 4) <= 0.5
          and abs(res.slope_naive + 6) <= 0.7
          and res.slope_naive < res.slope_max_ratio
          and elapsed < 120)
    record_acceptance(7, ok, f"slopes lambda_min {res.slope_lambda_min:.3f}, max ratio "
                             f"{res.slope_max_ratio:.3f}, naive {res.slope_naive:.3f} ({elapsed:.1f} s)")
    assert ok


def test_criterion_8_localization(record_acceptance):
    kernel = make_sobolev(2.0, 1)
    worst_a, worst_limit, worst_step = 0.0, math.inf, math.inf
    ok = True
    for cfg in range(20):
        seed = 800 + cfg
        n = int(rng.stream(seed, rng.POINTS).integers(2, 11))
        ps = generate("uniform_random", n, 1, seed=seed)
        al = rng.normal(rng.stream(seed, rng.ALPHA), n)
        found = localization_radius(kernel, ps, al, eps=0.5, max_factor=50.0)
        factors = np.geomspace(1e-3, 1e3, 40)
        prof = localization_profile(kernel, ps, al, factors / ps.q)
        step = float(np.diff(prof).min())
        ok &= found.found and found.a_eps <= 50 and step >= 0 and prof[-1] >= 0.999
        worst_a = max(worst_a, found.a_eps)
        worst_limit = min(worst_limit, prof[-1])
        worst_step = min(worst_step, step)
    record_acceptance(8, ok, f"max R*q_X {worst_a:.4g} <= 50, min ratio at 1e3/q_X {worst_limit:.8f}, "
                             f"min profile step {worst_step:.2e}")
    assert ok


def test_criterion_9_figure1(record_acceptance, tmp_path):
    ok = True
    parts = []
    for d in (1, 3):
        wins = 0
        perr = 0.0
        for seed in range(100):
            r = figure1_experiment(d, seed)
            perr = max(perr, r.parseval_error())
            wins += r.diag_band_mass(2) > r.shuffled_band_mass(2, seed)
        a, b = tmp_path / f"d{d}_a.pgm", tmp_path / f"d{d}_b.pgm"
        figure1_experiment(d, 0, out=a)
        figure1_experiment(d, 0, out=b)
        stable = a.read_bytes() == b.read_bytes() == pgm_bytes(figure1_experiment(d, 0))
        stable &= a.with_suffix(".csv").read_bytes() == b.with_suffix(".csv").read_bytes()
        ok &= perr <= 1e-8 and wins >= 95 and stable
        parts.append(f"d={d}: Parseval err {perr:.1e}, band wins {wins}/100, byte-stable {stable}")
    record_acceptance(9, ok, "; ".join(parts))
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
