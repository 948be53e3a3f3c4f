"""Exit criteria. Run with ``pytest tests/test_acceptance.py`` to get one
PASS/FAIL line per criterion in the terminal summary."""
import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from noisyclimb.cli import main
from noisyclimb.env_cartpole import preset
from noisyclimb.exploration import (
    AdaptiveSigma, EpsilonSchedule, OUProcess, adaptive_sigma_update, epsilon, ou_monte_carlo,
)
from noisyclimb.experiment import run_sweep
from noisyclimb.hillclimb import ClimbConfig, train
from noisyclimb.td_targets import (
    TargetParams, double_dqn_target, dqn_target, twin_min_target,
)

N_SEEDS = 20


@pytest.fixture(scope="module")
def sweep_v0():
    return run_sweep(preset("v0"), ClimbConfig(), N_SEEDS)


@pytest.fixture(scope="module")
def sweep_v1():
    return run_sweep(preset("v1"), ClimbConfig(), N_SEEDS)


@pytest.mark.acceptance(1, "epsilon schedule matches the published table within 1e-12")
def test_epsilon_table_exact():
    sched = EpsilonSchedule(m_eps=100, eps_min=0.01)
    table = {0: 1.0, 1: 0.9901, 2: 0.9802, 3: 0.9703, 98: 0.0298, 99: 0.0199, 100: 0.01}
    for i, expected in table.items():
        assert abs(epsilon(sched, i) - expected) <= 1e-12, i
    for i in range(100, 1000):
        assert abs(epsilon(sched, i) - 0.01) <= 1e-12


@pytest.mark.acceptance(2, "CartPole-v0: solve_rate >= 0.9, median <= 500, best <= 200 (20 seeds)")
def test_solves_cartpole_v0(sweep_v0):
    summary, _ = sweep_v0
    solved = [r.solved_at for r in summary.runs if r.solved_at is not None]
    print(f"v0 solved_at per seed: {[r.solved_at for r in summary.runs]}")
    assert summary.solve_rate >= 0.9
    assert summary.median_solved_at <= 500
    assert min(solved) <= 200


@pytest.mark.acceptance(3, "CartPole-v1: solve_rate >= 0.8, median <= 1000 (20 seeds)")
def test_solves_cartpole_v1(sweep_v1):
    summary, _ = sweep_v1
    print(f"v1 solved_at per seed: {[r.solved_at for r in summary.runs]}")
    assert summary.solve_rate >= 0.8
    assert summary.median_solved_at <= 1000


def _assert_noise_steps(trace, cfg):
    full = [cfg.noise_init] + list(trace)
    for prev, cur in zip(full, full[1:]):
        assert cur in (prev * cfg.scale_factor, prev / cfg.scale_factor,
                       cfg.noise_min, cfg.noise_max), (prev, cur)


def _assert_drops_on_improvement(log, cfg):
    best = -math.inf
    scale = cfg.noise_init
    for rec in log.records:
        if rec.g0 >= best:
            best = rec.g0
            assert rec.noise_scale == max(cfg.noise_min, scale / cfg.scale_factor)
        else:
            assert rec.noise_scale == min(cfg.noise_max, scale * cfg.scale_factor)
        scale = rec.noise_scale


@pytest.mark.acceptance(4, "noise scale moves only by x2, /2 or clamping; drops on improvement")
def test_noise_scale_dynamics(sweep_v0, sweep_v1):
    cfg = ClimbConfig()
    for _, logs in (sweep_v0, sweep_v1):
        for log in logs:
            _assert_noise_steps(log.noise_trace, cfg)
            _assert_drops_on_improvement(log, cfg)
            # improvement streaks pin log(noise) at the floor, as in the training curve
            logs_scale = np.log(log.noise_trace)
            assert logs_scale.min() == pytest.approx(math.log(cfg.noise_min))


@pytest.mark.acceptance(4, "noise scale moves only by x2, /2 or clamping; drops on improvement")
@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 31), noise_min=st.sampled_from([1e-4, 1e-3, 5e-3]),
       noise_max=st.sampled_from([0.05, 0.5, 2.0]))
def test_noise_scale_dynamics_property(seed, noise_min, noise_max):
    cfg = ClimbConfig(seed=seed, noise_min=noise_min, noise_max=noise_max, max_episodes=80)
    log = train(preset("v0"), cfg)
    _assert_noise_steps(log.noise_trace, cfg)
    _assert_drops_on_improvement(log, cfg)


def _demo_bias(capsys, *args):
    assert main(["demo-bias", "--seed", "0", *args]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    return {int(r["n_actions"]): (float(r["bias"]), float(r["std_err"])) for r in rows}


@pytest.mark.acceptance(5, "overestimation bias: n=2 within 1% of 1/sqrt(pi), n=1 ~ 0, monotone")
def test_overestimation_bias(capsys):
    (bias2, _), = _demo_bias(capsys, "--n", "2", "--std", "1", "--trials", "10000000").values()
    assert abs(bias2 - 1 / math.sqrt(math.pi)) <= 0.01 / math.sqrt(math.pi)

    sweep = _demo_bias(capsys, "--n", "1", "2", "5", "10", "50", "--std", "1",
                       "--trials", "1000000")
    bias1, se1 = sweep[1]
    assert abs(bias1) <= 3 * se1
    ns = sorted(sweep)
    for a, b in zip(ns, ns[1:]):
        (ba, sa), (bb, sb) = sweep[a], sweep[b]
        assert bb >= ba - 3 * math.hypot(sa, sb), (a, b)
    expected = {1: 0.0, 2: oracles.E_MAX_2, 5: oracles.E_MAX_5, 10: oracles.E_MAX_10,
                50: oracles.E_MAX_50}
    for n, (bias, se) in sweep.items():
        assert abs(bias - expected[n]) <= 4 * se, n


@pytest.mark.acceptance(6, "target identities over 1000 random rows")
def test_target_identities():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        n = int(rng.integers(1, 10))
        p = TargetParams(float(rng.normal(0, 5)), float(rng.uniform(0, 1)))
        q_cur = rng.normal(0, 10, n)
        q_tgt = rng.normal(0, 10, n)
        assert double_dqn_target(p, q_cur, q_cur) == dqn_target(p, q_cur)
        assert double_dqn_target(p, q_cur, q_tgt) <= dqn_target(p, q_tgt)
        q1, q2 = rng.normal(0, 10, 2)
        y = twin_min_target(p, q1, q2)
        assert y <= p.reward + p.gamma * q1 and y <= p.reward + p.gamma * q2


@pytest.mark.acceptance(7, "OU: variance within 5% of AR(1) value, lag-1 autocorr within 2%")
def test_ou_statistics():
    process = OUProcess(theta=0.15, sigma=0.2, dt=1.0)
    stats = ou_monte_carlo(process, 1_000_000, np.random.default_rng(0))
    assert abs(stats.variance - oracles.OU_VAR_DEFAULT) <= 0.05 * oracles.OU_VAR_DEFAULT
    assert abs(stats.autocorr_lag1 - 0.85) <= 0.02 * 0.85


@pytest.mark.acceptance(8, "n below-threshold sigma updates scale sigma by alpha**n")
def test_adaptive_sigma_geometry():
    for alpha in (1.01, 1.5, 2.0, 3.7):
        for n in (1, 5, 20, 100):
            a = AdaptiveSigma(sigma=0.1, alpha=alpha, delta=0.2)
            for _ in range(n):
                a = adaptive_sigma_update(a, 0.1)
            expected = 0.1 * alpha ** n
            assert abs(a.sigma - expected) <= 1e-12 * expected


@pytest.mark.acceptance(9, "byte-identical logs across reruns and serial vs parallel sweeps")
def test_determinism(tmp_path):
    cfg = ClimbConfig(seed=42)
    assert train(preset("v0"), cfg).to_csv() == train(preset("v0"), cfg).to_csv()

    serial, serial_logs = run_sweep(preset("v0"), ClimbConfig(seed=100), 4, workers=1)
    parallel, parallel_logs = run_sweep(preset("v0"), ClimbConfig(seed=100), 4, workers=2)
    assert [log.to_csv() for log in serial_logs] == [log.to_csv() for log in parallel_logs]
    assert serial.to_dict(include_timing=False) == parallel.to_dict(include_timing=False)

    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["train", "--seed", "9", "--out", str(a)])
    main(["train", "--seed", "9", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
