"""Building blocks of the scalar auxiliary variable (SAV) scheme.

Every function accepts a single state (q of shape (M,)) or a batch (q of shape (B, M) with one psi and one nu per row).
"""
import numpy as np
import scipy.linalg

from ..spectral.Potential_Field import Potential_Field
from ..string_model.Modal_Operators import Modal_Operators
from .Solver_Config import Solver_Config
from .Solver_State import Solver_State


def _column(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float64)[..., None]


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.sum(a * b, axis=-1)


def quadratise(V, eps: float):
    """
    :param V: potential energy, non-negative
    :param eps: gauge constant
    :return: psi = sqrt(2 V + eps)
    """
    V = np.asarray(V, dtype=np.float64)
    assert not np.any(V < 0.0), f"Potential field returned a negative potential: {V.min()}"
    return np.sqrt(2.0 * V + eps)


def g_std(q: np.ndarray, field: Potential_Field, eps: float) -> np.ndarray:
    """
    :param q: modal displacements
    :param field: potential field
    :param eps: gauge constant
    :return: grad_q sqrt(2 V(q) + eps) = -f(q) / sqrt(2 V(q) + eps)
    """
    force, V = field.force_and_potential(q)
    return -force / _column(quadratise(V, eps))


def g_mod(q: np.ndarray, p: np.ndarray, psi, field: Potential_Field, config: Solver_Config, V=None) -> np.ndarray:
    """
    Control term pulling psi back towards sqrt(2 V(q) + eps)
    :param q: modal displacements at the integer time step
    :param p: modal velocities
    :param psi: auxiliary variable
    :param field: potential field
    :param config: solver settings
    :param V: V(q) if already known
    :return: -lambda0 (psi - sqrt(2 V(q) + eps)) sign(p) / ||p||_1, or zero when ||p||_1 is below the tolerance
    """
    if config.lambda0 == 0.0:
        return np.zeros_like(p, dtype=np.float64)
    if V is None:
        V = field.potential(q)
    l1 = np.abs(p).sum(axis=-1)
    gap = np.asarray(psi, dtype=np.float64) - quadratise(V, config.eps)
    degenerate = l1 < config.p_l1_tolerance
    scale = np.where(degenerate, 0.0, -config.lambda0 * gap / np.where(degenerate, 1.0, l1))
    return _column(scale) * np.sign(p)


def sherman_morrison_apply(Sigma_diag: np.ndarray, c, g: np.ndarray, rhs: np.ndarray, k: float) -> np.ndarray:
    """
    Solve [I + k Sigma + c g g^T] x = rhs with A = I + k Sigma diagonal
    :param Sigma_diag: diagonal of Sigma
    :param c: rank one weight k^2 nu^2 / 4, scalar or one per batch row
    :param g: rank one direction
    :param rhs: right hand side
    :param k: time step
    :return: x = A^-1 rhs - c (A^-1 g)(g^T A^-1 rhs) / (1 + c g^T A^-1 g)
    """
    A = 1.0 + k * Sigma_diag
    Ainv_rhs = rhs / A
    Ainv_g = g / A
    c = _column(c)
    numerator = _column(_dot(g, Ainv_rhs))
    denominator = 1.0 + c * _column(_dot(g, Ainv_g))
    return Ainv_rhs - c * Ainv_g * numerator / denominator


def sav_update(q: np.ndarray, p: np.ndarray, psi, g: np.ndarray, Sigma: np.ndarray, Omega2: np.ndarray, nu, k: float, forcing: np.ndarray):
    """
    One update (q^n, p^n, psi^n) -> (q^n+1, p^n+1, psi^n+1) for an assembled g^n
    :param q: displacements at step n
    :param p: velocities at step n
    :param psi: auxiliary variable at step n
    :param g: g_std(q^n+1/2) + g_mod(q^n, p^n, psi^n)
    :param Sigma: loss diagonal
    :param Omega2: squared frequency diagonal
    :param nu: nonlinearity strength
    :param k: time step
    :param forcing: modal forcing Phi(xe) f_e^n+1/2
    :return: q^n+1/2, p^n+1, q^n+1, psi^n+1
    """
    q_half = q + 0.5 * k * p
    nu2 = np.asarray(nu, dtype=np.float64) ** 2
    c = 0.25 * k * k * nu2
    rhs = (1.0 - k * Sigma) * p - _column(c) * g * _column(_dot(g, p)) + k * (-Omega2 * q_half - _column(nu2 * psi) * g + forcing)
    p_next = sherman_morrison_apply(Sigma, c, g, rhs, k)
    q_next = q_half + 0.5 * k * p_next
    psi_next = psi + 0.5 * k * _dot(g, p_next + p)
    return q_half, p_next, q_next, psi_next


def energy(q_half_prev: np.ndarray, q_half_next: np.ndarray, p: np.ndarray, psi, ops: Modal_Operators, nu):
    """
    :param q_half_prev: displacements at n - 1/2
    :param q_half_next: displacements at n + 1/2
    :param p: velocities at n
    :param psi: auxiliary variable at n
    :param ops: modal operators
    :param nu: nonlinearity strength
    :return: E^n = p^T p / 2 + (q^n+1/2)^T Omega^2 q^n-1/2 / 2 + nu^2 psi^2 / 2
    """
    kinetic = 0.5 * _dot(p, p)
    stiffness = 0.5 * _dot(q_half_next * ops.Omega2, q_half_prev)
    return kinetic + stiffness + 0.5 * np.asarray(nu, dtype=np.float64) ** 2 * np.asarray(psi, dtype=np.float64) ** 2


def state_energy(state: Solver_State, ops: Modal_Operators, nu: float, k: float) -> float:
    """
    :return: numerical energy of a stored state, recovering q^n -/+ 1/2 as q^n -/+ k p^n / 2
    """
    return float(energy(state.q - 0.5 * k * state.p, state.q + 0.5 * k * state.p, state.p, state.psi, ops, nu))


def dense_reference_step(state: Solver_State, field: Potential_Field, ops: Modal_Operators, nu: float, config: Solver_Config, forcing: np.ndarray) -> Solver_State:
    """
    One step of the scheme with full matrices and a direct solve, used as an independent oracle
    :param state: state at step n
    :param field: potential field
    :param ops: modal operators
    :param nu: nonlinearity strength
    :param config: solver settings
    :param forcing: modal forcing Phi(xe) f_e^n+1/2
    :return: state at step n+1
    """
    k = config.k
    M = ops.M
    q, p, psi = state.q, state.p, state.psi
    q_half = q + 0.5 * k * p
    g = g_std(q_half, field, config.eps) + g_mod(q, p, psi, field, config)
    identity = np.eye(M)
    Sigma = np.diag(ops.Sigma)
    Omega2 = np.diag(ops.Omega2)
    rank_one = 0.25 * k * k * nu * nu * np.outer(g, g)
    lhs = identity + k * Sigma + rank_one
    rhs = (identity - k * Sigma - rank_one) @ p + k * (-Omega2 @ q_half - nu * nu * psi * g + forcing)
    p_next = scipy.linalg.solve(lhs, rhs, assume_a="sym")
    q_next = q_half + 0.5 * k * p_next
    psi_next = psi + 0.5 * k * float(g @ (p_next + p))
    return Solver_State(q_next, p_next, psi_next)
