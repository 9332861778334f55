"""Self-check suites run by the check command"""
import logging
from typing import Callable, Dict, List

import numpy as np
import scipy.linalg
from pydantic import BaseModel

from ..gradnet.GradNet_Params import gradnet_init
from ..gradnet.gradnet_functions import gradnet_force, gradnet_potential, gradnet_vjp_input
from ..solver.SAV_Solver import SAV_Solver
from ..solver.Solver_Config import Solver_Config
from ..solver.Solver_State import Solver_State
from ..solver.sav_operations import dense_reference_step, sherman_morrison_apply
from ..spectral.Spectral_Nonlinearity import oracle_force, oracle_potential, Spectral_Nonlinearity
from ..string_model.Modal_Operators import build_modal_operators
from ..string_model.String_Parameters import Excitation_Params, Scaled_String_Params
from ..training.gradient_check import gradient_check, tiny_gradient_instance

logger = logging.getLogger(__name__)


class Check_Result(BaseModel):
    """
        Outcome of one suite: the worst error seen against its tolerance
    """
    name: str
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tolerance)

    def __str__(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: error {self.error:1.3e} (tolerance {self.tolerance:g})"


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(np.linalg.norm(a), np.linalg.norm(b))
    return 0.0 if scale == 0.0 else float(np.linalg.norm(a - b) / scale)


def _central_gradient(function: Callable, q: np.ndarray, h: float) -> np.ndarray:
    gradient = np.zeros_like(q)
    for i in range(q.shape[0]):
        e = np.zeros_like(q)
        e[i] = h
        gradient[i] = (function(q + e) - function(q - e)) / (2.0 * h)
    return gradient


def _central_jacobian(function: Callable, q: np.ndarray, h: float) -> np.ndarray:
    columns = []
    for i in range(q.shape[0]):
        e = np.zeros_like(q)
        e[i] = h
        columns.append((function(q + e) - function(q - e)) / (2.0 * h))
    return np.stack(columns, axis=-1)


def _random_string(rng: np.random.Generator, M: int, lossless: bool = False) -> Scaled_String_Params:
    return Scaled_String_Params(gamma=rng.uniform(123.48, 246.94), kappa=rng.uniform(1.01, 1.1), nu=rng.uniform(123.48, 174.62),
                                sigma0=0.0 if lossless else 3.0, sigma1_hat=0.0 if lossless else 2e-4, M=M)


def spectral_gradient_suite(seed: int = 0, samples: int = 100) -> Check_Result:
    """
    Central differences of the spectral potential against the spectral force
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for M in (2, 6, 20):
        for _ in range(samples):
            q = rng.normal(0.0, 1e-2, M)
            worst = max(worst, _relative(_central_gradient(oracle_potential, q, 1e-7), -oracle_force(q)))
    return Check_Result(name="spectral gradient oracle", error=worst, tolerance=1e-6)


def gradnet_consistency_suite(seed: int = 0, samples: int = 100) -> List[Check_Result]:
    """
    Central differences of V_theta against f_theta and of f_theta against its input VJP, non-negativity of V_theta,
    and symmetry of the finite-difference Jacobian of f_theta
    """
    rng = np.random.default_rng(seed)
    M, H = 6, 16
    params = gradnet_init(M, H, 0.01, rng)
    force = lambda x: gradnet_force(x, params)
    worst, asymmetry = 0.0, 0.0
    for _ in range(samples):
        q, v = rng.normal(0.0, 1e-2, M), rng.normal(0.0, 1.0, M)
        worst = max(worst, _relative(_central_gradient(lambda x: gradnet_potential(x, params), q, 1e-7), -force(q)))
        directional = (force(q + 1e-7 * v) - force(q - 1e-7 * v)) / 2e-7
        worst = max(worst, _relative(gradnet_vjp_input(q, params, None, v), directional))
        J = _central_jacobian(force, q, 1e-7)
        asymmetry = max(asymmetry, _relative(J, J.T))
    if np.any(gradnet_potential(rng.normal(0.0, 1.0, (1000, M)), params) < 0.0):
        worst = np.inf
    return [Check_Result(name="gradnet potential consistency", error=worst, tolerance=1e-7),
            Check_Result(name="gradnet jacobian symmetry", error=asymmetry, tolerance=1e-6)]


def sherman_morrison_suite(seed: int = 0, samples: int = 50) -> Check_Result:
    """
    Rank-one corrected diagonal solve against a dense LU solve
    """
    rng = np.random.default_rng(seed)
    M, k = 20, 1.0 / 32000.0
    worst = 0.0
    for _ in range(samples):
        Sigma, g, rhs = rng.uniform(0.0, 100.0, M), rng.normal(0.0, 1.0, M), rng.normal(0.0, 1.0, M)
        c = rng.uniform(0.0, 1e-3)
        dense = scipy.linalg.lu_solve(scipy.linalg.lu_factor(np.diag(1.0 + k * Sigma) + c * np.outer(g, g)), rhs)
        worst = max(worst, _relative(sherman_morrison_apply(Sigma, c, g, rhs, k), dense))
    return Check_Result(name="sherman-morrison vs dense", error=worst, tolerance=1e-13)


def dense_step_suite(seed: int = 0, samples: int = 50) -> Check_Result:
    """
    Single solver steps from random states against a dense direct-solve implementation
    """
    rng = np.random.default_rng(seed)
    M = 20
    config = Solver_Config(fs=32000.0, lambda0=1.0)
    field = Spectral_Nonlinearity(M)
    worst = 0.0
    for _ in range(samples):
        string = _random_string(rng, M)
        ops = build_modal_operators(string)
        excitation = Excitation_Params(famp=3e4, Te=1e-3, xe=rng.uniform(0.1, 0.9), xo=rng.uniform(0.1, 0.9))
        solver = SAV_Solver(ops, field, string.nu, config, excitation)
        state = solver.consistent_initial_state(rng.normal(0.0, 1e-2, M), rng.normal(0.0, 10.0, M))
        state = Solver_State(state.q, state.p, state.psi * rng.uniform(0.9, 1.1))
        f_e = rng.uniform(0.0, 3e4)
        fast = solver.step(state, f_e)
        dense = dense_reference_step(state, field, ops, string.nu, config, solver.input_gain * f_e)
        worst = max(worst, _relative(np.concatenate([fast.q, fast.p, [fast.psi]]), np.concatenate([dense.q, dense.p, [dense.psi]])))
    return Check_Result(name="solver step vs dense reference", error=worst, tolerance=1e-12)


def energy_suite(seed: int = 0, steps: int = 100000, M: int = 30, fs: float = 88200.0, tolerance: float = 1e-9) -> Check_Result:
    """
    Lossless, unforced, uncontrolled rollout with the spectral nonlinearity conserves the numerical energy.
    The defaults run 10^5 steps of a 30-mode string at 88.2 kHz.
    """
    rng = np.random.default_rng(seed)
    string = _random_string(rng, M, lossless=True)
    ops = build_modal_operators(string)
    config = Solver_Config(fs=fs, lambda0=0.0)
    solver = SAV_Solver(ops, Spectral_Nonlinearity(M), string.nu, config, Excitation_Params(famp=0.0, Te=1e-3, xe=0.5, xo=0.5))
    state = solver.consistent_initial_state(rng.normal(0.0, 1e-2, M) / np.arange(1, M + 1))
    E0 = solver.energy(state)
    worst = 0.0
    for n in range(steps):
        state = solver.step(state, 0.0, n)
        worst = max(worst, abs(solver.energy(state) - E0) / E0)
    return Check_Result(name="energy conservation", error=worst, tolerance=tolerance)


def backprop_suite(seed: int = 0) -> List[Check_Result]:
    """
    Segment gradients against central differences, without control and with the control term detached
    """
    results = []
    for lambda0, tolerance in ((0.0, 1e-7), (1.0, 1e-5)):
        batch, params = tiny_gradient_instance(lambda0=lambda0, seed=seed)
        check = gradient_check(batch, params)
        results.append(Check_Result(name=f"backprop vs finite differences (lambda0={lambda0:g})", error=check.relative_error, tolerance=tolerance))
    return results


SUITES: Dict[str, Callable] = {
    "spectral": spectral_gradient_suite,
    "gradnet": gradnet_consistency_suite,
    "sherman-morrison": sherman_morrison_suite,
    "step": dense_step_suite,
    "energy": energy_suite,
    "backprop": backprop_suite,
}


def run_suites(names: List[str] = None) -> List[Check_Result]:
    """
    :param names: suites to run, all when not given
    :return: results in suite order
    """
    results = []
    for name in SUITES if not names else names:
        outcome = SUITES[name]()
        results.extend(outcome if isinstance(outcome, list) else [outcome])
        logger.debug(f"Finished suite {name}")
    return results
