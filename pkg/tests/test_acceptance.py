"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the lines are
collected in the "acceptance criteria" section of the terminal summary.
"""

import subprocess
import sys
import time

import numpy as np
import pytest

from rubberfront.bounds import apriori_front_cap
from rubberfront.coupler import COMPLETED, RunConfig, run, run_sequential
from rubberfront.model import BoundaryDrive, InitialProfile, ModelParams, b_star
from rubberfront.presets import PRESETS, load_preset, random_admissible
from rubberfront.verify import alpha_regression, convergence_study, epsilon_study, static_cosine

SUITE_SIZE = 60


@pytest.fixture(scope="module")
def random_suite():
    rng = np.random.default_rng(1729)
    start = time.perf_counter()
    out = []
    for _ in range(SUITE_SIZE):
        cfg = random_admissible(rng, T=1.0, N=200, dt=1e-3)
        out.append((cfg, run(cfg.params, cfg.drive, cfg.initial, cfg.run)))
    return out, time.perf_counter() - start


def _u_star(cfg, result):
    return max(cfg.params.alpha * float(np.max(result.s_values)), b_star(cfg.drive, cfg.initial, cfg.params.gamma) / cfg.params.gamma)


def test_criterion_01_non_negativity(random_suite, criterion):
    suite, elapsed = random_suite
    worst = min(result.min_u / _u_star(cfg, result) for cfg, result in suite)
    completed = all(result.status == COMPLETED for _, result in suite)
    ok = completed and worst >= -1e-8 and elapsed < 120.0
    criterion("min u >= -1e-8 u* over random suite", ok, f"{len(suite)} configs, worst min/u* = {worst:.3e}, {elapsed:.1f}s")


def test_criterion_02_sup_bound(random_suite, criterion):
    suite, _ = random_suite
    worst = max(result.max_u / _u_star(cfg, result) for cfg, result in suite)
    criterion("max u <= u* (1 + 1e-8) over random suite", worst <= 1.0 + 1e-8, f"worst max/u* = {worst:.12f}")


def test_criterion_03_front_cap(criterion):
    params = ModelParams(a0=1.0, alpha=1.0, beta=1.0, gamma=1.0, s0=1.0, T=10.0)
    drive, u0 = BoundaryDrive.constant(1.0, 10.0), InitialProfile.constant(1.0, 1.0)
    cap = apriori_front_cap(params, drive, u0).M_front
    worked = run_sequential(params, drive, u0, RunConfig(N=100, dt=1e-2))
    ok = abs(cap - 1.97102) <= 1e-4 and worked.status == COMPLETED and np.max(worked.s_values) <= cap

    rng = np.random.default_rng(314)
    margins = []
    for _ in range(12):
        cfg = random_admissible(rng, T=2.0, N=100, dt=1e-3)
        if cfg.params.alpha == 0.0:
            continue
        drive_c = BoundaryDrive.constant(float(rng.uniform(0.0, 2.0)), 2.0)
        res = run(cfg.params, drive_c, cfg.initial, cfg.run)
        margins.append(apriori_front_cap(cfg.params, drive_c, cfg.initial).M_front - np.max(res.s_values))
        ok = ok and res.status == COMPLETED
    ok = ok and min(margins) >= 0.0
    criterion(
        "max s <= M_front for constant drive",
        ok,
        f"worked M_front = {cap:.6f}, worked max s = {np.max(worked.s_values):.6f}, {len(margins)} random, min margin {min(margins):.3e}",
    )


@pytest.mark.parametrize(
    "a0, alpha, gamma, b, s0, u0",
    [(1.0, 1.0, 1.0, 1.0, 0.5, 0.0), (0.5, 2.0, 2.0, 3.0, 1.5, 2.0)],
)
def test_criterion_04_equilibrium(a0, alpha, gamma, b, s0, u0, criterion):
    T = 20.0 / (a0 * alpha)
    params = ModelParams(a0=a0, alpha=alpha, beta=1.0, gamma=gamma, s0=s0, T=T)
    result = run_sequential(params, BoundaryDrive.constant(b, T), InitialProfile.constant(u0, s0), RunConfig(N=50, dt=1e-2))
    s_inf, u_inf = b / (gamma * alpha), b / gamma
    ds = abs(result.states[-1].s - s_inf) / s_inf
    du = float(np.max(np.abs(result.states[-1].u - u_inf))) / u_inf
    ok = result.status == COMPLETED and ds <= 0.01 and du <= 0.01
    criterion(f"relaxation to equilibrium (alpha={alpha}, gamma={gamma}, b={b})", ok, f"rel s error {ds:.2e}, rel u error {du:.2e}")


def test_criterion_05_mms_orders(criterion):
    case = static_cosine()
    spatial = convergence_study(case, [(N, 2.0 / N**2) for N in (50, 100, 200)])
    temporal = convergence_study(case, [(400, dt) for dt in (4e-3, 2e-3, 1e-3)], t_final=0.5)
    ok = spatial.passed and temporal.passed and min(spatial.orders) >= 1.9 and min(temporal.orders) >= 0.9
    detail = "spatial " + ", ".join(f"{o:.3f}" for o in spatial.orders) + "; temporal " + ", ".join(f"{o:.3f}" for o in temporal.orders)
    criterion("manufactured-solution orders", ok, detail)


def test_criterion_06_picard_contraction(criterion):
    cfg = load_preset("generic_picard")
    constants, ratios, ok = [], [], True
    for dt in (cfg.run.dt, cfg.run.dt / 2):
        pic_cfg = cfg.with_values(dt=dt)
        seq_cfg = RunConfig(N=pic_cfg.run.N, dt=dt)
        pic = run(cfg.params, cfg.drive, cfg.initial, pic_cfg.run)
        seq = run(cfg.params, cfg.drive, cfg.initial, seq_cfg)
        ok = ok and pic.status == COMPLETED and seq.status == COMPLETED
        ok = ok and all(w.converged for w in pic.windows)
        ratios += [r for w in pic.windows for r in w.ratios]
        constants.append(float(np.max(np.abs(pic.s_values - seq.s_values))) / dt)
    stable = np.isfinite(constants).all() and 0.5 <= constants[1] / constants[0] <= 2.0
    ok = ok and max(ratios) < 1.0 and stable
    criterion(
        "Picard contraction and agreement with sequential",
        ok,
        f"max ratio {max(ratios):.3f}, C = {constants[0]:.4f} -> {constants[1]:.4f} under dt halving",
    )


def test_criterion_07_mollifier_limit(criterion):
    cfg = load_preset("generic")
    table = epsilon_study(cfg.params, cfg.drive, cfg.initial, (0.1, 0.05, 0.025))
    devs = ", ".join(f"{r.deviation:.3e}" for r in table.rows)
    criterion("mollified deviations non-increasing", table.passed, devs)


def test_criterion_08_alpha_zero(criterion):
    cfg = load_preset("alpha0")
    report = alpha_regression(cfg.params, cfg.drive, cfg.initial, cfg.params.T, N=cfg.run.N, dt=cfg.run.dt)
    detail = f"min s_t = {report.min_s_t:.2e}, s(T) = {report.s_final:.4f}, paired max s {report.paired_max_s:.4f} <= {report.paired_M_front:.4f}"
    criterion("alpha = 0 monotone growth, paired run capped", report.passed, detail)


def test_criterion_09_decoupled_ode(criterion):
    params = ModelParams(a0=1.5, alpha=0.8, beta=1.0, gamma=1.0, s0=1.2, T=1.0)
    drive, u0 = BoundaryDrive.constant(0.0), InitialProfile.constant(0.0, params.s0)
    rate = params.a0 * params.alpha
    errors = {}
    for dt in (1e-2, 5e-3, 1e-3):
        res = run_sequential(params, drive, u0, RunConfig(N=20, dt=dt))
        exact = params.s0 * np.exp(-rate * res.times)
        errors[dt] = float(np.max(np.abs(res.s_values - exact)))
    within = all(errors[dt] <= 5.0 * dt * rate * params.s0 for dt in (1e-2, 1e-3))
    halving = 1.8 <= errors[1e-2] / errors[5e-3] <= 2.2
    detail = ", ".join(f"dt={dt:g}: {e:.3e}" for dt, e in errors.items())
    criterion("front matches s0 exp(-a0 alpha t) to first order", within and halving, detail)


def _invoke(command, preset, out):
    return subprocess.run(
        [sys.executable, "-m", "rubberfront", command, "--preset", preset, "--out", str(out)],
        capture_output=True,
        text=True,
    ).returncode


def test_criterion_10_determinism(tmp_path, criterion):
    mismatches, compared = [], 0
    for name in sorted(PRESETS):
        command = "sweep" if "[sweep]" in PRESETS[name] else "run"
        codes = [_invoke(command, name, tmp_path / f"{name}_{k}") for k in (0, 1)]
        if codes[0] != codes[1]:
            mismatches.append(f"{name}: exit {codes}")
            continue
        first = sorted(p.relative_to(tmp_path / f"{name}_0") for p in (tmp_path / f"{name}_0").rglob("*.csv"))
        for rel in first:
            compared += 1
            if (tmp_path / f"{name}_0" / rel).read_bytes() != (tmp_path / f"{name}_1" / rel).read_bytes():
                mismatches.append(f"{name}/{rel}")
    criterion("byte-identical CSV artifacts for every preset", not mismatches, f"{compared} files compared; {mismatches or 'no differences'}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
