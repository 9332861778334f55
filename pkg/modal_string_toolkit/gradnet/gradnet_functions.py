"""Forward and reverse passes of the gradient network.

All functions accept a single state q of shape (M,) or a batch of shape (B, M).
Reverse passes over a batch return gradients summed over the batch in index order.
"""
from typing import Optional, Tuple, Union

import numpy as np

from ..errors import Invalid_Parameter_Error
from .GradNet_Params import GradNet_Gradients, GradNet_Params


def leaky_relu(x: np.ndarray, neg_slope: float) -> np.ndarray:
    return np.where(x >= 0.0, x, neg_slope * x)


def leaky_relu_deriv(x: np.ndarray, neg_slope: float) -> np.ndarray:
    """
    :return: 1 for x >= 0 (including the kink at zero), neg_slope otherwise
    """
    return np.where(x >= 0.0, 1.0, neg_slope)


def leaky_relu_antiderivative(x: np.ndarray, neg_slope: float) -> np.ndarray:
    """
    :return: phi(x) = x^2/2 for x >= 0 and neg_slope x^2/2 otherwise, non-negative with phi(0) = 0
    """
    return 0.5 * x * x * np.where(x >= 0.0, 1.0, neg_slope)


class GradNet_Tape:
    """
        Cached hidden activations of one forward pass, reused by the reverse passes
    """

    def __init__(self, q: np.ndarray, params: GradNet_Params):
        if q.shape[-1] != params.M:
            raise Invalid_Parameter_Error(f"Expected {params.M} modes but got q of shape {q.shape}")
        self.q: np.ndarray = q
        self.params: GradNet_Params = params
        self.Wq: np.ndarray = q @ params.W.T
        self.z: np.ndarray = params.beta * self.Wq + params.b
        self.sigma: np.ndarray = leaky_relu(self.z, params.neg_slope)
        self.sigma_deriv: np.ndarray = leaky_relu_deriv(self.z, params.neg_slope)

    def matches(self, q: np.ndarray, params: GradNet_Params) -> bool:
        """
        :return: True if this tape was recorded for the given state and parameters
        """
        return params is self.params and (q is self.q or np.array_equal(q, self.q))


def _tape_for(q: np.ndarray, params: GradNet_Params, tape: Optional[GradNet_Tape]) -> GradNet_Tape:
    if tape is None:
        return GradNet_Tape(q, params)
    assert tape.matches(q, params), "Stale tape: recorded for a different state or parameter set"
    return tape


def gradnet_force(q: np.ndarray, params: GradNet_Params, return_tape: bool = False) -> Union[np.ndarray, Tuple[np.ndarray, GradNet_Tape]]:
    """
    :param q: modal displacements
    :param params: network parameters
    :param return_tape: if True, also return the tape of this forward pass
    :return: f_theta(q) = -W^T [alpha * sigma(z)], optionally with its tape
    """
    tape = GradNet_Tape(q, params)
    force = -(params.alpha * tape.sigma) @ params.W
    if return_tape:
        return force, tape
    return force


def gradnet_potential(q: np.ndarray, params: GradNet_Params, tape: Optional[GradNet_Tape] = None):
    """
    :param q: modal displacements
    :param params: network parameters
    :param tape: optional tape of a forward pass at q
    :return: V_theta(q) = sum_i (alpha_i/beta_i) phi(z_i), scalar per state
    """
    tape = _tape_for(q, params, tape)
    return (params.ratio * leaky_relu_antiderivative(tape.z, params.neg_slope)).sum(axis=-1)


def gradnet_vjp_input(q: np.ndarray, params: GradNet_Params, tape: Optional[GradNet_Tape], upstream: np.ndarray) -> np.ndarray:
    """
    :param q: modal displacements
    :param params: network parameters
    :param tape: tape of a forward pass at q
    :param upstream: cotangent of f_theta(q), same shape as q
    :return: (d f_theta / d q)^T upstream = -W^T diag(alpha sigma'(z) beta) W upstream
    """
    tape = _tape_for(q, params, tape)
    hidden = params.alpha * tape.sigma_deriv * params.beta * (upstream @ params.W.T)
    return -hidden @ params.W


def _as_rows(array: np.ndarray, width: int) -> np.ndarray:
    return array.reshape(-1, width)


def gradnet_vjp_params(q: np.ndarray, params: GradNet_Params, tape: Optional[GradNet_Tape], upstream: np.ndarray) -> GradNet_Gradients:
    """
    Reverse-mode gradient of upstream^T f_theta(q) with respect to every parameter
    :param q: modal displacements
    :param params: network parameters
    :param tape: tape of a forward pass at q
    :param upstream: cotangent of f_theta(q)
    :return: gradients for W, b, log_alpha and log_beta, summed over a batch
    """
    tape = _tape_for(q, params, tape)
    H, M = params.H, params.M
    alpha, beta = params.alpha, params.beta
    Wu = _as_rows(upstream @ params.W.T, H)
    activation = _as_rows(alpha * tape.sigma, H)
    slope = _as_rows(alpha * tape.sigma_deriv, H) * Wu
    dW = -(activation.T @ _as_rows(upstream, M)) - ((slope * beta).T @ _as_rows(q, M))
    db = -slope.sum(axis=0)
    dlog_alpha = -(activation * Wu).sum(axis=0)
    dlog_beta = -(slope * beta * _as_rows(tape.Wq, H)).sum(axis=0)
    return GradNet_Gradients(dW, db, dlog_alpha, dlog_beta)


def gradnet_potential_grad_params(q: np.ndarray, params: GradNet_Params, tape: Optional[GradNet_Tape] = None, upstream=1.0) -> GradNet_Gradients:
    """
    Reverse-mode gradient of upstream * V_theta(q) with respect to every parameter
    :param q: modal displacements
    :param params: network parameters
    :param tape: tape of a forward pass at q
    :param upstream: cotangent of V_theta(q), scalar or one value per batch row
    :return: gradients for W, b, log_alpha and log_beta, summed over a batch
    """
    tape = _tape_for(q, params, tape)
    H, M = params.H, params.M
    weights = np.reshape(np.broadcast_to(np.asarray(upstream, dtype=np.float64), tape.z.shape[:-1]), (-1, 1))
    ratio = params.ratio
    activation = weights * _as_rows(tape.sigma, H)
    antiderivative = weights * _as_rows(leaky_relu_antiderivative(tape.z, params.neg_slope), H)
    dW = (params.alpha * activation).T @ _as_rows(q, M)
    db = (ratio * activation).sum(axis=0)
    dlog_alpha = (ratio * antiderivative).sum(axis=0)
    dlog_beta = (params.alpha * activation * _as_rows(tape.Wq, H) - ratio * antiderivative).sum(axis=0)
    return GradNet_Gradients(dW, db, dlog_alpha, dlog_beta)
