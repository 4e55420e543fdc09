import numpy as np
import pytest

from tangleopt.channels import ChannelSpec
from tangleopt.evolution import (IntegrationError, evolve, evolve_ensemble,
                                 rk4_step, tangle_trajectory)
from tangleopt.linalg import density_of, pure_from_schmidt
from tangleopt.sampling import state_with_tangle

BELL2 = density_of(pure_from_schmidt([0.5, 0.5], np.eye(2), np.eye(2)))
DEPH1 = ChannelSpec("dephasing", q=1.0)


def bell_tangle(t):
    # populations stay (1/2, 1/2); the coherence decays as gamma(t) =
    # gamma(0) exp(-2 (2^q - 1)^2 t) per unit rate, and tangle = 4 gamma^2
    return np.exp(-4.0 * t)


def test_rk4_fixed_point():
    rho = np.diag([0.3, 0.2, 0.4, 0.1]).astype(complex)
    out = rk4_step(rho, DEPH1, 0.01)
    assert np.max(np.abs(out - rho)) < 1e-14


def test_rk4_preserves_trace():
    out = rk4_step(BELL2, ChannelSpec("decay", q=0.5), 0.01)
    assert abs(np.trace(out).real - 1.0) < 1e-12


def test_rk4_step_error_scales():
    def step_err(h):
        out = rk4_step(BELL2, DEPH1, h)
        return abs(out[0, 3].real - 0.5 * np.exp(-2.0 * h))

    ratio = step_err(0.02) / step_err(0.01)
    assert ratio > 12.0


def test_rk4_rejects_bad_step():
    with pytest.raises(ValueError):
        rk4_step(BELL2, DEPH1, 0.0)
    with pytest.raises(ValueError):
        rk4_step(BELL2, DEPH1, -0.1)


def test_closed_form_trajectory():
    traj = evolve(BELL2, DEPH1, 1.0, 512)
    assert np.max(np.abs(traj.tangle - bell_tangle(traj.times))) < 1e-6
    assert traj.trace_err.max() < 1e-8
    assert traj.min_eig.min() > -1e-8
    assert traj.herm_err.max() < 1e-14


def test_ground_state_is_stationary_under_decay():
    ground = np.zeros(4)
    ground[0] = 1.0
    traj = evolve(density_of(ground), ChannelSpec("decay", q=1.0), 1.0, 64)
    assert np.max(np.abs(traj.states - traj.states[0])) < 1e-13
    assert np.max(traj.tangle) < 1e-12


def test_global_convergence_order():
    def global_err(steps):
        traj = evolve(BELL2, DEPH1, 1.0, steps)
        return np.max(np.abs(traj.tangle - bell_tangle(traj.times)))

    assert global_err(32) / global_err(64) >= 12.0


def test_trace_monitor_under_long_run():
    rho0 = density_of(state_with_tangle(1.2, 3, np.random.default_rng(0)))
    traj = evolve(rho0, ChannelSpec("decay", q=1.0, rate=2.0), 1.0, 512)
    assert traj.trace_err.max() < 1e-8


def test_monitor_blowout_raises_with_time():
    # a huge rate at a coarse step drives eigenvalues far negative
    with pytest.raises(IntegrationError) as err:
        evolve(BELL2, ChannelSpec("decay", q=1.0, rate=300.0), 1.0, 4)
    assert err.value.time > 0.0


def test_evolve_argument_validation():
    with pytest.raises(ValueError):
        evolve(BELL2, DEPH1, 0.0, 8)
    with pytest.raises(ValueError):
        evolve(BELL2, DEPH1, 1.0, 0)


def test_tangle_trajectory_projection():
    traj = evolve(BELL2, DEPH1, 0.5, 32)
    series = tangle_trajectory(traj)
    assert series.shape == (33, 2)
    assert series[0, 0] == 0.0
    assert abs(series[0, 1] - 1.0) < 1e-12
    assert np.all(series[:, 1] >= 0.0)
    assert np.all(series[:, 1] <= 1.0 + 1e-9)


def test_ensemble_matches_single_trajectories():
    rng_states = [density_of(state_with_tangle(1.3, 3, np.random.default_rng(j)))
                  for j in range(4)]
    spec = ChannelSpec("decay", q=0.3)
    ens = evolve_ensemble(np.stack(rng_states), spec, 0.5, 64)
    for j, rho in enumerate(rng_states):
        single = evolve(rho, spec, 0.5, 64)
        assert np.max(np.abs(single.tangle - ens.tangle[j])) < 1e-12
        assert np.max(np.abs(single.min_eig - ens.min_eig[j])) < 1e-10
