"""Finite-difference verification of the segment gradients"""
import logging
from typing import Optional

import numpy as np

from ..gradnet.GradNet_Params import GradNet_Params, gradnet_init
from ..solver.Solver_Config import Solver_Config
from ..string_model.Modal_Operators import build_modal_operators
from ..string_model.String_Parameters import Excitation_Params, Scaled_String_Params
from ..string_model.excitation import excitation_samples
from .Segment import Segment, Segment_Batch, Segment_Context
from .segment_backprop import forward_backward_batch, forward_segment_batch, segment_batch_loss

logger = logging.getLogger(__name__)


class Gradient_Check:
    """
        Analytic and central-difference gradients of a batch loss over every parameter
    """

    def __init__(self, analytic: np.ndarray, numeric: np.ndarray):
        self.analytic: np.ndarray = analytic
        self.numeric: np.ndarray = numeric

    @property
    def relative_error(self) -> float:
        """
        :return: ||analytic - numeric|| / max(||analytic||, ||numeric||), zero when both vanish
        """
        scale = max(np.linalg.norm(self.analytic), np.linalg.norm(self.numeric))
        if scale == 0.0:
            return 0.0
        return float(np.linalg.norm(self.analytic - self.numeric) / scale)

    def passed(self, tolerance: float) -> bool:
        return self.relative_error <= tolerance

    def __str__(self):
        return f"Gradient_Check({self.analytic.shape[0]} parameters, relative error {self.relative_error:1.3e})"


def gradient_check(batch: Segment_Batch, params: GradNet_Params, step: float = 1e-6, detach_control: bool = True,
                   indices: Optional[np.ndarray] = None) -> Gradient_Check:
    """
    Compare forward_backward_batch with central differences of the mean segment loss
    :param batch: segments to differentiate through
    :param params: parameters at which to differentiate
    :param step: finite-difference step, scaled by max(1, |theta_i|)
    :param detach_control: evaluate perturbed losses with the control terms of the unperturbed rollout
    :param indices: flat parameter indices to check, all when not given
    :return: both gradients over the checked indices
    """
    result = forward_backward_batch(batch, params)
    assert result.diverged == 0, f"{result.diverged} segments diverged during the gradient check"
    frozen = forward_segment_batch(batch, params).g_mod if detach_control else None
    theta = params.flatten()
    indices = np.arange(theta.shape[0]) if indices is None else np.asarray(indices)
    numeric = np.zeros(indices.shape[0])
    for j, i in enumerate(indices):
        h = step * max(1.0, abs(theta[i]))
        plus, minus = theta.copy(), theta.copy()
        plus[i] += h
        minus[i] -= h
        loss_plus = float(np.mean(segment_batch_loss(batch, params.unflatten(plus), frozen)))
        loss_minus = float(np.mean(segment_batch_loss(batch, params.unflatten(minus), frozen)))
        numeric[j] = (loss_plus - loss_minus) / (2.0 * h)
    check = Gradient_Check(result.grads.flatten()[indices], numeric)
    logger.debug(str(check))
    return check


def tiny_gradient_instance(lambda0: float = 0.0, seed: int = 0, M: int = 4, H: int = 6, steps: int = 8, batch: int = 2, nu: float = 500.0):
    """
    Small strongly nonlinear problem on which central differences are accurate
    :param lambda0: control gain of the forward pass
    :param seed: seed of states, targets and parameters
    :param M: number of modes
    :param H: hidden dimension
    :param steps: solver steps per segment
    :param batch: number of segments
    :param nu: nonlinearity strength
    :return: a batch of segments with random targets and random parameters
    """
    rng = np.random.default_rng(seed)
    string = Scaled_String_Params(gamma=200.0, kappa=1.0, nu=nu, sigma0=1.0, sigma1_hat=2e-4, M=M)
    excitation = Excitation_Params(famp=2e3, Te=1e-3, xe=0.3, xo=0.7)
    config = Solver_Config(fs=32000.0, lambda0=lambda0)
    context = Segment_Context(build_modal_operators(string), string.nu, excitation, config)
    segments = []
    for index in range(batch):
        q0, p0 = rng.normal(0.0, 1e-2, M), rng.normal(0.0, 5.0, M)
        q = q0 + rng.normal(0.0, 1e-3, (steps + 1, M))
        p = p0 + rng.normal(0.0, 1.0, (steps + 1, M))
        q[0], p[0] = q0, p0
        start = index * steps
        forcing = excitation_samples(steps, config.k, excitation, t_offset=start * config.k)
        segments.append(Segment(start, q, p, forcing, config.k, context, index))
    params = gradnet_init(M, H, 0.01, rng)
    params = GradNet_Params(params.W, rng.normal(0.0, 0.1, H), rng.normal(0.0, 0.1, H), rng.normal(0.0, 0.1, H), params.neg_slope)
    return Segment_Batch(segments), params
