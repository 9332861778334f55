import math

import numpy as np
import numpy.testing as npt
import pytest

from modal_string_toolkit.cli.checks import energy_suite
from modal_string_toolkit.errors import File_Format_Error, Invalid_Parameter_Error, Solver_Diverged_Error, Stability_Error
from modal_string_toolkit.evaluation.pitch import estimate_fundamental
from modal_string_toolkit.solver.SAV_Solver import SAV_Solver, simulate, step
from modal_string_toolkit.solver.Solver_Config import Solver_Config
from modal_string_toolkit.solver.Solver_State import Solver_State
from modal_string_toolkit.solver.sav_operations import dense_reference_step, g_mod, sav_update, sherman_morrison_apply, state_energy
from modal_string_toolkit.solver.trajectory_io import parse_trajectory, read_trajectory, trajectory_bytes, write_trajectory
from modal_string_toolkit.spectral.Potential_Field import Potential_Field, Zero_Field
from modal_string_toolkit.spectral.Spectral_Nonlinearity import Spectral_Nonlinearity
from modal_string_toolkit.string_model.Modal_Operators import build_modal_operators


class Broken_Field(Potential_Field):
    """Field whose values are not numbers"""

    def potential(self, q):
        return np.full(q.shape[:-1], np.nan) if q.ndim > 1 else np.nan

    def force(self, q):
        return np.full(q.shape, np.nan)


def plucked_state(solver, rng):
    return solver.consistent_initial_state(rng.normal(0.0, 1e-2, solver.ops.M) / np.arange(1, solver.ops.M + 1))


def test_sherman_morrison_against_a_dense_solve(rng):
    k = 1.0 / 32000.0
    Sigma, g, rhs = rng.uniform(0.0, 50.0, 8), rng.normal(0.0, 1.0, 8), rng.normal(0.0, 1.0, 8)
    c = 2e-4
    dense = np.linalg.solve(np.diag(1.0 + k * Sigma) + c * np.outer(g, g), rhs)
    npt.assert_allclose(sherman_morrison_apply(Sigma, c, g, rhs, k), dense, rtol=1e-13)


def test_step_against_the_dense_reference(string, ops, excitation, rng):
    config = Solver_Config(fs=32000.0, lambda0=1.0)
    field = Spectral_Nonlinearity(ops.M)
    solver = SAV_Solver(ops, field, string.nu, config, excitation)
    for _ in range(10):
        state = solver.consistent_initial_state(rng.normal(0.0, 1e-2, ops.M), rng.normal(0.0, 10.0, ops.M))
        state = Solver_State(state.q, state.p, state.psi * rng.uniform(0.9, 1.1))
        f_e = rng.uniform(0.0, 3e4)
        fast = solver.step(state, f_e)
        dense = dense_reference_step(state, field, ops, string.nu, config, solver.input_gain * f_e)
        npt.assert_allclose(fast.q, dense.q, rtol=1e-12, atol=1e-18)
        npt.assert_allclose(fast.p, dense.p, rtol=1e-12, atol=1e-14)
        assert fast.psi == pytest.approx(dense.psi, rel=1e-12)


def test_module_level_step_and_simulate(string, ops, excitation, config):
    field = Spectral_Nonlinearity(ops.M)
    solver = SAV_Solver(ops, field, string.nu, config, excitation)
    state = solver.rest_state()
    assert step(state, field, ops, excitation, string.nu, config, 1e4) == solver.step(state, 1e4)
    assert simulate(string, ops, field, excitation, config, 50) == solver.simulate(50)


@pytest.mark.parametrize("lambda0", [0.0, 1.0])
def test_lossless_unforced_rollout_conserves_energy(lossless_string, silence, rng, lambda0):
    ops = build_modal_operators(lossless_string)
    solver = SAV_Solver(ops, Spectral_Nonlinearity(ops.M), lossless_string.nu, Solver_Config(fs=32000.0, lambda0=lambda0), silence)
    state = plucked_state(solver, rng)
    E0 = solver.energy(state)
    for n in range(3000):
        state = solver.step(state, 0.0, n)
        assert solver.energy(state) == pytest.approx(E0, rel=1e-10)


def test_energy_check_defaults_to_the_long_rollout():
    assert energy_suite.__defaults__ == (0, 100000, 30, 88200.0, 1e-9)
    assert energy_suite(steps=2000, M=6, fs=32000.0).passed


def test_losses_dissipate_energy(string, ops, silence, config, rng):
    solver = SAV_Solver(ops, Spectral_Nonlinearity(ops.M), string.nu, config, silence)
    trajectory = solver.simulate(2000, plucked_state(solver, rng))
    energies = np.array([state_energy(trajectory.state(n), ops, string.nu, config.k) for n in range(trajectory.N)])
    assert np.all(np.diff(energies) <= 1e-12 * energies[0])
    assert energies[-1] < energies[0]


def test_rest_is_a_fixed_point(string, ops, silence, config):
    solver = SAV_Solver(ops, Spectral_Nonlinearity(ops.M), string.nu, config, silence)
    trajectory = solver.simulate(200)
    npt.assert_array_equal(trajectory.q, np.zeros((200, ops.M)))
    npt.assert_array_equal(trajectory.p, np.zeros((200, ops.M)))
    npt.assert_array_equal(trajectory.psi, np.full(200, math.sqrt(config.eps)))


def test_linear_string_oscillates_at_the_discrete_frequency(lossless_string, silence):
    ops = build_modal_operators(lossless_string)
    config = Solver_Config(fs=32000.0)
    solver = SAV_Solver(ops, Zero_Field(ops.M), lossless_string.nu, config, silence)
    q0 = np.zeros(ops.M)
    q0[0] = 1e-3
    trajectory = solver.simulate(16000, solver.consistent_initial_state(q0))
    npt.assert_array_equal(trajectory.q[:, 1:], 0.0)
    omega = 2.0 / config.k * math.asin(math.sqrt(ops.Omega2[0]) * config.k / 2.0)
    assert estimate_fundamental(trajectory.q[:, 0], config.fs) == pytest.approx(omega / (2.0 * math.pi), rel=1e-6)
    assert np.max(np.abs(trajectory.q[:, 0])) == pytest.approx(1e-3, rel=1e-4)


def test_pluck_reaches_the_output(string, ops, excitation, config):
    trajectory = SAV_Solver(ops, Spectral_Nonlinearity(ops.M), string.nu, config, excitation).simulate(400)
    assert trajectory.is_finite()
    assert np.max(np.abs(trajectory.w)) > 0.0
    assert trajectory.mean_psi_drift(Spectral_Nonlinearity(ops.M)) < 1e-2 * np.max(trajectory.psi)


def test_batched_update_matches_single_rows(ops, rng):
    B, M, k = 3, ops.M, 1.0 / 32000.0
    q, p, g = rng.normal(0.0, 1e-2, (B, M)), rng.normal(0.0, 1.0, (B, M)), rng.normal(0.0, 1.0, (B, M))
    psi, nu, forcing = rng.uniform(0.0, 1e-3, B), rng.uniform(100.0, 200.0, B), rng.normal(0.0, 1.0, (B, M))
    batched = sav_update(q, p, psi, g, ops.Sigma, ops.Omega2, nu, k, forcing)
    for i in range(B):
        single = sav_update(q[i], p[i], psi[i], g[i], ops.Sigma, ops.Omega2, nu[i], k, forcing[i])
        for a, b in zip(batched, single):
            npt.assert_allclose(a[i], b, rtol=1e-14)


def test_control_term():
    field = Spectral_Nonlinearity(3)
    q, p = np.array([1e-2, 0.0, 0.0]), np.array([1.0, -2.0, 0.0])
    config = Solver_Config(lambda0=2.0)
    gap = 0.5 - math.sqrt(2.0 * field.potential(q) + config.eps)
    npt.assert_allclose(g_mod(q, p, 0.5, field, config), -2.0 * gap * np.sign(p) / 3.0)
    npt.assert_array_equal(g_mod(q, np.zeros(3), 0.5, field, config), np.zeros(3))
    npt.assert_array_equal(g_mod(q, p, 0.5, field, Solver_Config(lambda0=0.0)), np.zeros(3))


def test_consistent_initial_state(string, ops, excitation, config, rng):
    field = Spectral_Nonlinearity(ops.M)
    solver = SAV_Solver(ops, field, string.nu, config, excitation)
    q0 = rng.normal(0.0, 1e-2, ops.M)
    state = solver.consistent_initial_state(q0)
    assert state.psi == pytest.approx(math.sqrt(2.0 * field.potential(q0) + config.eps), rel=1e-15)
    npt.assert_array_equal(state.p, np.zeros(ops.M))


def test_invalid_solvers_are_refused(string, ops, excitation):
    with pytest.raises(Stability_Error):
        SAV_Solver(ops, Spectral_Nonlinearity(ops.M), string.nu, Solver_Config(fs=1000.0), excitation)
    with pytest.raises(Invalid_Parameter_Error):
        SAV_Solver(ops, Spectral_Nonlinearity(ops.M + 1), string.nu, Solver_Config(), excitation)
    with pytest.raises(Invalid_Parameter_Error):
        SAV_Solver(ops, Spectral_Nonlinearity(ops.M), -1.0, Solver_Config(), excitation)


def test_divergence_reports_the_step(string, ops, excitation, config):
    solver = SAV_Solver(ops, Broken_Field(ops.M), string.nu, config, excitation)
    with pytest.raises(Solver_Diverged_Error) as error:
        solver.step(Solver_State(np.full(ops.M, 1e-3), np.zeros(ops.M), 1.0), 0.0, n=4)
    assert error.value.step_index == 5


def test_decimated_recording(string, ops, excitation, config):
    solver = SAV_Solver(ops, Spectral_Nonlinearity(ops.M), string.nu, config, excitation)
    full = solver.simulate(101)
    decimated = solver.simulate(101, decimation=25)
    assert decimated.N == 5 and decimated.sample_rate == config.fs / 25
    npt.assert_array_equal(decimated.q, full.q[::25])
    npt.assert_array_equal(decimated.w, full.w[::25])


def test_trajectory_file(string, ops, excitation, config, tmp_path):
    trajectory = SAV_Solver(ops, Spectral_Nonlinearity(ops.M), string.nu, config, excitation).simulate(64, decimation=3)
    path = tmp_path / "pluck.mtrj"
    write_trajectory(path, trajectory)
    assert read_trajectory(path) == trajectory
    payload = path.read_bytes()
    assert payload[:4] == b"MTRJ"
    with pytest.raises(File_Format_Error):
        parse_trajectory(b"RIFF" + payload[4:])
    with pytest.raises(File_Format_Error):
        parse_trajectory(payload[:-1])
    with pytest.raises(File_Format_Error):
        parse_trajectory(payload[:10])
    assert trajectory_bytes(read_trajectory(path)) == payload
