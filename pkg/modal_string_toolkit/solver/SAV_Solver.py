"""Explicit, unconditionally energy-stable SAV integration of the modal string"""
import logging
from typing import Optional

import numpy as np

from ..errors import Invalid_Parameter_Error, Solver_Diverged_Error, Stability_Error
from ..spectral.Potential_Field import Potential_Field
from ..string_model.Modal_Operators import Modal_Operators, check_stability, mode_shape
from ..string_model.String_Parameters import Excitation_Params, Scaled_String_Params
from ..string_model.excitation import excitation_samples
from .Solver_Config import Solver_Config
from .Solver_State import Solver_State
from .Trajectory import Trajectory, Trajectory_Recorder
from .sav_operations import g_mod, quadratise, sav_update, state_energy

logger = logging.getLogger(__name__)


class SAV_Solver:
    """
        Integrates p' = -Sigma p - Omega^2 q + nu^2 f(q) + Phi(xe) f_e with the scalar auxiliary variable psi = sqrt(2 V(q) + eps).
        One instance integrates one trajectory at a time and is not thread safe.
    """

    def __init__(self, ops: Modal_Operators, field: Potential_Field, nu: float, config: Solver_Config, excitation: Excitation_Params,
                 input_gain: Optional[np.ndarray] = None):
        """
        :param ops: modal operators of the string
        :param field: nonlinearity the scheme integrates
        :param nu: nonlinearity strength
        :param config: solver settings
        :param excitation: excitation and pickup positions
        :param input_gain: modal input gain, Phi(xe) when not given
        """
        if field.M != ops.M:
            raise Invalid_Parameter_Error(f"Field acts on {field.M} modes but the string has {ops.M}")
        if nu < 0.0:
            raise Invalid_Parameter_Error(f"Nonlinearity strength must be non-negative but got {nu}")
        stable, margin = check_stability(ops, config.k)
        if not stable:
            raise Stability_Error(f"Highest mode exceeds 2/k by {-margin:1.3e} rad/s at fs={config.fs:g}", parameters=ops)
        self.ops: Modal_Operators = ops
        self.field: Potential_Field = field
        self.nu: float = float(nu)
        self.config: Solver_Config = config
        self.excitation: Excitation_Params = excitation
        self.input_gain: np.ndarray = mode_shape(excitation.xe, ops.M) if input_gain is None else np.asarray(input_gain, dtype=np.float64)
        self.output_gain: np.ndarray = mode_shape(excitation.xo, ops.M)
        assert self.input_gain.shape == (ops.M,), f"Input gain must have shape ({ops.M},) but got {self.input_gain.shape}"

    @property
    def k(self) -> float:
        return self.config.k

    def consistent_initial_state(self, q0: np.ndarray, p0: Optional[np.ndarray] = None) -> Solver_State:
        """
        :param q0: initial displacements
        :param p0: initial velocities, zero when not given
        :return: state with psi^0 = sqrt(2 V(q^0) + eps)
        """
        p0 = np.zeros_like(q0, dtype=np.float64) if p0 is None else p0
        return Solver_State(np.asarray(q0, dtype=np.float64), np.asarray(p0, dtype=np.float64), float(quadratise(self.field.potential(q0), self.config.eps)))

    def rest_state(self) -> Solver_State:
        return self.consistent_initial_state(np.zeros(self.ops.M))

    def assemble_g(self, state: Solver_State) -> np.ndarray:
        """
        :param state: state at step n
        :return: g^n = g_std(q^n+1/2) + g_mod(q^n, p^n, psi^n)
        """
        q_half = state.q + 0.5 * self.k * state.p
        force, V_half = self.field.force_and_potential(q_half)
        g = -force / quadratise(V_half, self.config.eps)
        if self.config.lambda0 > 0.0:
            g = g + g_mod(state.q, state.p, state.psi, self.field, self.config)
        return g

    def step(self, state: Solver_State, f_e_half: float, n: int = 0) -> Solver_State:
        """
        :param state: state at step n
        :param f_e_half: excitation force at t^n+1/2
        :param n: step index, reported when the update is not finite
        :return: state at step n+1
        """
        g = self.assemble_g(state)
        _, p_next, q_next, psi_next = sav_update(state.q, state.p, state.psi, g, self.ops.Sigma, self.ops.Omega2, self.nu, self.k,
                                                 self.input_gain * f_e_half)
        if not np.isfinite(psi_next):
            raise Solver_Diverged_Error(n + 1, "auxiliary variable")
        if not np.all(np.isfinite(p_next)) or not np.all(np.isfinite(q_next)):
            raise Solver_Diverged_Error(n + 1, "modal state")
        return Solver_State(q_next, p_next, float(psi_next))

    def energy(self, state: Solver_State) -> float:
        """
        :return: numerical energy E^n of a state
        """
        return state_energy(state, self.ops, self.nu, self.k)

    def simulate(self, N: int, initial: Optional[Solver_State] = None, decimation: int = 1, t_offset: float = 0.0) -> Trajectory:
        """
        Roll the scheme out from an initial state
        :param N: number of states to produce, including the initial one
        :param initial: state at n = 0, the consistent rest state when not given
        :param decimation: keep every r-th state
        :param t_offset: time of the initial state, used to sample the excitation
        :return: the trajectory of states and audio output
        """
        if N < 1:
            raise Invalid_Parameter_Error(f"A rollout needs at least one state but got N={N}")
        state = self.rest_state() if initial is None else initial.copy()
        recorder = Trajectory_Recorder(N, self.ops.M, self.output_gain, decimation)
        recorder.record(0, state)
        forcing = excitation_samples(N - 1, self.k, self.excitation, t_offset)
        logger.debug(f"Simulating {N} states of {self.ops} with nu={self.nu:g}, lambda0={self.config.lambda0:g}")
        for n in range(N - 1):
            state = self.step(state, float(forcing[n]), n)
            recorder.record(n + 1, state)
        trajectory = recorder.trajectory(self.config.fs, self.excitation, self.config.lambda0, self.config.eps)
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug(f"Mean auxiliary drift {trajectory.mean_psi_drift(self.field):1.3e} over {trajectory.N} stored states")
        return trajectory

    def __str__(self):
        return f"SAV_Solver({self.ops}, nu={self.nu:g}, fs={self.config.fs:g}, field={self.field})"


def step(state: Solver_State, field: Potential_Field, ops: Modal_Operators, excitation: Excitation_Params, nu: float, config: Solver_Config,
         f_e_half: float) -> Solver_State:
    """
    :return: the state following the given one under a single update of the scheme
    """
    return SAV_Solver(ops, field, nu, config, excitation).step(state, f_e_half)


def simulate(params: Scaled_String_Params, ops: Modal_Operators, field: Potential_Field, excitation: Excitation_Params, config: Solver_Config,
             N: int, initial: Optional[Solver_State] = None, decimation: int = 1) -> Trajectory:
    """
    :param params: scaled string parameters, providing nu
    :param ops: modal operators built from params
    :param field: nonlinearity
    :param excitation: excitation and pickup
    :param config: solver settings
    :param N: number of states including the initial one
    :param initial: initial state, the consistent rest state when not given
    :param decimation: keep every r-th state
    :return: the simulated trajectory
    """
    return SAV_Solver(ops, field, params.nu, config, excitation).simulate(N, initial, decimation)
