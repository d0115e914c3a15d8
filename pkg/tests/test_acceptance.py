"""Acceptance criteria 1-13, one test each.

Every test records a single PASS/FAIL line; the lines are printed in the
terminal summary (see conftest.py) and also on stdout with ``-s``.
"""

import itertools
import math
import shutil

import numpy as np
import pytest
from scipy import integrate

from conftest import make_params, smooth_positive
from fracfilm import spectral as sp
from fracfilm.cli import cmd_run, cmd_sweep
from fracfilm.config import RunConfig, initial_field
from fracfilm.diagnostics import (audit_trajectory, holder_fit_time, positivity_check,
                                  positivity_threshold, theoretical_time_exponent)
from fracfilm.entropy import EntropyFn, MobilitySpec, entropy_values, mobility
from fracfilm.spectral import SpectralField
from fracfilm.stepper import epsilon_continuation, implicit_euler_run
from fracfilm.verify import identity_values, kernel_error, random_field

RESULTS = {}
ALPHAS = (0.5, 1.0, 1.5)


def record(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def rel(a, b):
    s = max(abs(a), abs(b))
    return 0.0 if s == 0 else abs(a - b) / s


@pytest.fixture(scope="module")
def matrix_runs():
    u0 = smooth_positive(32, a1=0.3, a2=-0.1, a3=0.05)
    runs = {}
    for a, n, e in itertools.product(ALPHAS, (1.0, 3.0), (1e-2, 1e-4)):
        p = make_params(alpha=a, n=n, eps=e, n_modes=32)
        runs[a, n, e] = implicit_euler_run(u0, 0.02, 20, p)
    return runs


def test_c01_operator_identities():
    rng = np.random.default_rng(101)
    worst = 0.0
    for alpha in ALPHAS:
        for _ in range(20):
            u, v = random_field(64, rng), random_field(64, rng)
            for a, b in identity_values(u, alpha, v).values():
                worst = max(worst, rel(a, b))
    record(1, worst <= 1e-10, f"worst relative error {worst:.2e} (tol 1e-10, 60 fields)")


def test_c02_kernel_cross_validation():
    rng = np.random.default_rng(202)
    u = random_field(9, rng)
    parts, ok = [], True
    for alpha in ALPHAS:
        e1 = kernel_error(u, alpha, 10_000, 10_000)
        e2 = kernel_error(u, alpha, 20_000, 20_000)
        ok &= e1 <= 1e-2 and e2 < e1
        parts.append(f"a={alpha}: {e1:.2e} -> {e2:.2e}")
    record(2, ok, "; ".join(parts))


def test_c03_exact_inversion():
    rng = np.random.default_rng(303)
    worst = 0.0
    for alpha in ALPHAS:
        for _ in range(10):
            c = rng.standard_normal(64)
            g = SpectralField(c)
            zero_mean = SpectralField(np.concatenate([[0.0], c[1:]]))
            back = -sp.apply_I(sp.invert_I(zero_mean, alpha), alpha).coeffs
            worst = max(worst, np.max(np.abs(back - zero_mean.coeffs)) / np.max(np.abs(c)))
            v = sp.shifted_invert_I(g, alpha)
            img = -sp.apply_I(v, alpha) + SpectralField.constant(v.mean, 64)
            worst = max(worst, np.max(np.abs(img.coeffs - c)) / np.max(np.abs(c)))
    record(3, worst <= 1e-12, f"worst round-trip error {worst:.2e} (tol 1e-12)")


def test_c04_mass_conservation(matrix_runs):
    worst = -math.inf
    for traj in matrix_runs.values():
        m0 = traj.states[0].mean
        for k, u in enumerate(traj.states):
            worst = max(worst, abs(u.mean - m0) - k * traj.params.newton_tol)
    record(4, worst <= 0.0, f"max(|mass drift| - k*newton_tol) = {worst:.2e} over 12 runs")


def test_c05_energy_inequality(matrix_runs):
    verdicts = [audit_trajectory(t).energy for t in matrix_runs.values()]
    worst = min(v.worst_slack for v in verdicts)
    record(5, all(v.passed for v in verdicts), f"worst slack {worst:.2e} (tol -1e-9, 12 runs)")


def test_c06_entropy_inequality(matrix_runs):
    verdicts = [audit_trajectory(t).entropy for t in matrix_runs.values()]
    finite = [v for v in verdicts if not v.skipped]
    worst = min(v.worst_slack for v in finite)
    ok = len(finite) == len(verdicts) and all(v.passed for v in finite)
    record(6, ok, f"worst slack {worst:.2e} (tol -1e-9, {len(finite)} finite-entropy runs)")


def _double_integral(s, n):
    inner = lambda r: integrate.quad(lambda t: t ** -n, 1.0, r, epsabs=1e-14, epsrel=1e-13)[0]
    return integrate.quad(inner, 1.0, s, epsabs=1e-14, epsrel=1e-13, limit=200)[0]


def test_c07_entropy_closed_forms():
    s = np.geomspace(0.1, 10.0, 13)
    worst_q, worst_fd = 0.0, 0.0
    for n in (1.0, 1.5, 2.0, 3.0):
        got = entropy_values(s, EntropyFn(n, 0.0))
        ref = np.array([_double_integral(si, n) for si in s])
        worst_q = max(worst_q, float(np.max(np.abs(got - ref))))
        for eps in (0.0, 1e-4, 1e-2):
            fn = EntropyFn(n, eps)
            h = 4e-4 * s
            g2 = (entropy_values(s + h, fn) - 2 * entropy_values(s, fn)
                  + entropy_values(s - h, fn)) / h ** 2
            worst_fd = max(worst_fd, float(np.max(np.abs(g2 * mobility(s, MobilitySpec(n, eps)) - 1))))
    record(7, worst_q <= 1e-8 and worst_fd <= 1e-6,
           f"closed form vs quadrature {worst_q:.2e} (tol 1e-8); |G''f - 1| {worst_fd:.2e} (tol 1e-6)")


def test_c08_time_consistency(tmp_path):
    cfg = RunConfig(n_modes=32, T=0.02, epsilon=(1e-4,), output_dir=str(tmp_path))
    code, rows = cmd_sweep(cfg, "tau", [1e-3, 5e-4, 2.5e-4, 1.25e-4])
    orders = [r["order"] for r in rows if math.isfinite(r["order"])]
    ok = code == 0 and len(orders) == 2 and min(orders) >= 0.9
    record(8, ok, "observed orders " + ", ".join(f"{o:.3f}" for o in orders) + " (need >= 0.9)")


def test_c09_eps_continuation():
    cfg = RunConfig(initial_condition="bump", bump_offset=0.02, n_modes=64, n=3.0, alpha=1.0,
                    T=0.05, n_steps=50)
    u0 = initial_field(cfg)
    sched = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5]
    res = epsilon_continuation(u0, cfg.T, cfg.n_steps, cfg.params(sched[0]), sched)
    d = res.distances
    decreasing = all(b < a for a, b in zip(d, d[1:]))
    m = 8 * cfg.n_modes
    low = min(float(sp.synthesize(u, m).values.min()) for u in res.trajectories[-1].states)
    finite = math.isfinite(audit_trajectory(res.trajectories[0]).diagnostics[0].entropy)
    record(9, decreasing and low >= -1e-3 and finite,
           "distances " + ", ".join(f"{x:.2e}" for x in d) + f"; min u at eps=1e-5 {low:.3e}")


def test_c10_positivity_regime():
    c = np.zeros(32)
    c[0], c[1] = 0.3, 0.25 / math.sqrt(2)  # 0.3 + 0.25 cos(pi x), min 0.05
    p = make_params(alpha=1.0, n=4.0, eps=1e-4, n_modes=32)
    traj = implicit_euler_run(SpectralField(c), 0.05, 50, p)
    v = positivity_check(traj)
    exact = (positivity_threshold(1.0) == 3.0 and positivity_threshold(0.5) == 2 + 2 / 1.5
             and positivity_threshold(1.5) == 2.8)
    ok = v.hypothesis and v.status == "pass" and exact
    record(10, ok, f"threshold {v.threshold}, min {v.min_value:.4f} > floor {v.floor:.1e}")


def test_c11_limit_operators():
    rng = np.random.default_rng(1111)
    u = SpectralField(rng.standard_normal(64))
    k = np.arange(64)
    lap = np.array_equal(sp.apply_I(u, 2.0).coeffs, -(k * np.pi) ** 2 * u.coeffs)
    zero = -u.coeffs.copy()
    zero[0] = 0.0
    mean_removal = np.array_equal(sp.apply_I(u, 0.0).coeffs, zero)
    record(11, lap and mean_removal, f"alpha=2 exact: {lap}; alpha=0 exact: {mean_removal}")


def test_c12_exponent_bookkeeping():
    ok = all(theoretical_time_exponent(a) == ((a - 1) / 2) / (2 * ((a - 1) / 2) + 3)
             for a in (0.5, 1.0, 1.25, 1.5, 1.9))
    mu = theoretical_time_exponent(1.5)
    traj = implicit_euler_run(smooth_positive(16), 0.01, 10, make_params(alpha=1.5))
    reported = holder_fit_time(traj).theoretical
    ok = ok and abs(mu - 1 / 14) <= np.finfo(float).eps and reported == mu
    record(12, ok, f"mu(1.5) = {mu!r}, 1/14 = {1 / 14!r}")


def test_c13_determinism(tmp_path):
    out = tmp_path / "run"
    cfg = RunConfig(n_modes=16, n_steps=10, noise=0.01, seed=3, output_dir=str(out))
    names = ("diagnostics.csv", "snapshots.csv", "report.json")
    assert cmd_run(cfg) == 0
    first = {n: (out / n).read_bytes() for n in names}
    shutil.rmtree(out)
    assert cmd_run(cfg) == 0
    same = all((out / n).read_bytes() == first[n] for n in names)
    record(13, same, "byte-identical " + ", ".join(names))
