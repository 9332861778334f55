"""Discretise-then-optimise gradients through the SAV update.

The forward pass runs the scheme over a batch of teacher-forced segments and keeps a tape per step.
The reverse pass propagates adjoints through the psi update, the rank-one corrected solve and g_std.
The control term g_mod is a constant of the reverse pass.
"""
import logging
from typing import List, Optional, Tuple

import numpy as np

from ..gradnet.GradNet_Field import GradNet_Field
from ..gradnet.GradNet_Params import GradNet_Gradients, GradNet_Params
from ..gradnet.gradnet_functions import (GradNet_Tape, gradnet_force, gradnet_potential, gradnet_potential_grad_params, gradnet_vjp_input,
                                         gradnet_vjp_params)
from ..solver.sav_operations import g_mod, quadratise, sav_update, sherman_morrison_apply
from .Segment import Segment, Segment_Batch
from .losses import segment_losses

logger = logging.getLogger(__name__)


def consistent_psi_init(q0: np.ndarray, params: GradNet_Params, eps: float):
    """
    :param q0: initial displacements, one state or a batch
    :param params: network parameters
    :param eps: gauge constant
    :return: psi_0 = sqrt(2 V_theta(q0) + eps)
    """
    return quadratise(gradnet_potential(q0, params), eps)


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.sum(a * b, axis=-1)


class Step_Tape:
    """
        What the reverse pass needs from one forward step
    """

    def __init__(self, q_half: np.ndarray, tape: GradNet_Tape, force: np.ndarray, root: np.ndarray, g: np.ndarray):
        self.q_half: np.ndarray = q_half
        self.tape: GradNet_Tape = tape
        self.force: np.ndarray = force
        self.root: np.ndarray = root
        self.g: np.ndarray = g


class Segment_Forward:
    """
        Predicted states of a batch of segments, with the control term used at every step
    """

    def __init__(self, q: np.ndarray, p: np.ndarray, psi: np.ndarray, g_mod: np.ndarray, steps: List[Step_Tape]):
        self.q: np.ndarray = q
        self.p: np.ndarray = p
        self.psi: np.ndarray = psi
        self.g_mod: np.ndarray = g_mod
        self.steps: List[Step_Tape] = steps

    def finite_rows(self) -> np.ndarray:
        """
        :return: per segment, True if the whole rollout stayed finite
        """
        return np.all(np.isfinite(self.q), axis=(1, 2)) & np.all(np.isfinite(self.p), axis=(1, 2)) & np.all(np.isfinite(self.psi), axis=1)


class Batch_Gradient:
    """
        Mean segment loss of a batch and its gradient, with the number of segments skipped for divergence
    """

    def __init__(self, loss: float, grads: GradNet_Gradients, segment_losses: np.ndarray, diverged: int):
        self.loss: float = loss
        self.grads: GradNet_Gradients = grads
        self.segment_losses: np.ndarray = segment_losses
        self.diverged: int = diverged

    @property
    def evaluated(self) -> int:
        return len(self.segment_losses)


def forward_segment_batch(batch: Segment_Batch, params: GradNet_Params, frozen_g_mod: Optional[np.ndarray] = None,
                          keep_tapes: bool = False) -> Segment_Forward:
    """
    Teacher-forced rollout of every segment from its true initial state
    :param batch: stacked segments
    :param params: network parameters
    :param frozen_g_mod: (B, L-1, M) control terms to use instead of computing them, for finite differences under detachment
    :param keep_tapes: keep what the reverse pass needs
    :return: predicted states, shape (B, L, M) and (B, L)
    """
    B, L, M = batch.q.shape
    k = batch.k
    config = batch.config
    field = GradNet_Field(params)
    q = np.zeros((B, L, M))
    p = np.zeros((B, L, M))
    psi = np.zeros((B, L))
    control = np.zeros((B, max(L - 1, 0), M))
    q[:, 0] = batch.q[:, 0]
    p[:, 0] = batch.p[:, 0]
    psi[:, 0] = consistent_psi_init(batch.q[:, 0], params, config.eps)
    steps = []
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for n in range(L - 1):
            q_n, p_n, psi_n = q[:, n], p[:, n], psi[:, n]
            q_half = q_n + 0.5 * k * p_n
            force, tape = gradnet_force(q_half, params, return_tape=True)
            root = quadratise(gradnet_potential(q_half, params, tape), config.eps)
            g = -force / root[:, None]
            if frozen_g_mod is not None:
                control[:, n] = frozen_g_mod[:, n]
            elif config.lambda0 > 0.0:
                control[:, n] = g_mod(q_n, p_n, psi_n, field, config)
            g = g + control[:, n]
            _, p[:, n + 1], q[:, n + 1], psi[:, n + 1] = sav_update(q_n, p_n, psi_n, g, batch.Sigma, batch.Omega2, batch.nu, k,
                                                                    batch.input_gain * batch.forcing[:, n, None])
            if keep_tapes:
                steps.append(Step_Tape(q_half, tape, force, root, g))
    return Segment_Forward(q, p, psi, control, steps)


def _backward(batch: Segment_Batch, params: GradNet_Params, forward: Segment_Forward, dq: np.ndarray, dp: np.ndarray) -> GradNet_Gradients:
    """
    :param dq: cotangents of the predicted displacements, shape (B, L, M)
    :param dp: cotangents of the predicted velocities
    :return: gradient with respect to every network parameter
    """
    k = batch.k
    Sigma, Omega2 = batch.Sigma, batch.Omega2
    nu2 = batch.nu ** 2
    c = 0.25 * k * k * nu2
    grads = GradNet_Gradients.zeros_like(params)
    q_bar = dq[:, -1].copy()
    p_bar = dp[:, -1].copy()
    psi_bar = np.zeros(batch.B)
    for n in reversed(range(batch.L - 1)):
        step = forward.steps[n]
        g = step.g
        p_n, p_next, psi_n = forward.p[:, n], forward.p[:, n + 1], forward.psi[:, n]
        # psi^n+1 = psi^n + k/2 g^T (p^n+1 + p^n)
        g_bar = psi_bar[:, None] * 0.5 * k * (p_next + p_n)
        p_next_bar = p_bar + psi_bar[:, None] * 0.5 * k * g
        p_n_bar = psi_bar[:, None] * 0.5 * k * g
        psi_n_bar = psi_bar.copy()
        # q^n+1 = q^n+1/2 + k/2 p^n+1
        q_half_bar = q_bar.copy()
        p_next_bar = p_next_bar + 0.5 * k * q_bar
        # [A + c g g^T] p^n+1 = rhs, the matrix is symmetric
        r = sherman_morrison_apply(Sigma, c, g, p_next_bar, k)
        r_g = _dot(r, g)
        g_bar -= c[:, None] * (r * _dot(p_next, g)[:, None] + p_next * r_g[:, None])
        g_bar -= c[:, None] * (r * _dot(g, p_n)[:, None] + p_n * r_g[:, None])
        g_bar -= (k * nu2 * psi_n)[:, None] * r
        p_n_bar += (1.0 - k * Sigma) * r - c[:, None] * g * r_g[:, None]
        q_half_bar -= k * Omega2 * r
        psi_n_bar -= k * nu2 * r_g
        # g_std = grad V / sqrt(2 V + eps) at q^n+1/2, with grad V = -f
        grad_V = -step.force
        G_bar = g_bar / step.root[:, None]
        V_bar = -_dot(g_bar, grad_V) / step.root ** 3
        q_half_bar += V_bar[:, None] * grad_V - gradnet_vjp_input(step.q_half, params, step.tape, G_bar)
        grads = grads + gradnet_potential_grad_params(step.q_half, params, step.tape, V_bar)
        grads = grads + gradnet_vjp_params(step.q_half, params, step.tape, -G_bar)
        # q^n+1/2 = q^n + k/2 p^n
        q_bar = q_half_bar + dq[:, n]
        p_bar = p_n_bar + 0.5 * k * q_half_bar + dp[:, n]
        psi_bar = psi_n_bar
    # psi_0 = sqrt(2 V_theta(q_0) + eps)
    return grads + gradnet_potential_grad_params(forward.q[:, 0], params, None, psi_bar / forward.psi[:, 0])


def _loss_cotangents(batch: Segment_Batch, forward: Segment_Forward) -> Tuple[np.ndarray, np.ndarray]:
    mask = batch.mask()[..., None]
    scale = 1.0 / (batch.M * batch.lengths * batch.B)
    dq = np.where(mask, forward.q - batch.q, 0.0) * scale[:, None, None]
    dp = np.where(mask, forward.p - batch.p, 0.0) * scale[:, None, None]
    return dq, dp


def forward_backward_batch(batch: Segment_Batch, params: GradNet_Params) -> Batch_Gradient:
    """
    Loss averaged over the segments of a batch and its exact gradient. Segments whose rollout is not finite are skipped.
    :param batch: stacked segments
    :param params: network parameters
    :return: mean loss, gradient of the mean loss, per-segment losses and the number of skipped segments
    """
    forward = forward_segment_batch(batch, params, keep_tapes=True)
    finite = forward.finite_rows()
    if not np.all(finite):
        diverged = int(np.sum(~finite))
        logger.debug(f"{diverged} of {batch.B} segments diverged and are skipped: {[str(s) for s, f in zip(batch.segments, finite) if not f]}")
        if diverged == batch.B:
            return Batch_Gradient(float("nan"), GradNet_Gradients.zeros_like(params), np.zeros(0), diverged)
        result = forward_backward_batch(batch.subset(finite), params)
        result.diverged += diverged
        return result
    losses = segment_losses(forward.q, forward.p, batch.q, batch.p, batch.mask())
    dq, dp = _loss_cotangents(batch, forward)
    grads = _backward(batch, params, forward, dq, dp)
    return Batch_Gradient(float(np.mean(losses)), grads, losses, 0)


def forward_backward_segment(segment: Segment, params: GradNet_Params) -> Tuple[float, GradNet_Gradients]:
    """
    :param segment: teacher-forced segment with its solver context
    :param params: network parameters
    :return: segment loss and its gradient with respect to every parameter
    """
    result = forward_backward_batch(Segment_Batch([segment]), params)
    return result.loss, result.grads


def segment_batch_loss(batch: Segment_Batch, params: GradNet_Params, frozen_g_mod: Optional[np.ndarray] = None) -> np.ndarray:
    """
    :return: loss of every segment of a batch, without gradients
    """
    forward = forward_segment_batch(batch, params, frozen_g_mod)
    return segment_losses(forward.q, forward.p, batch.q, batch.p, batch.mask())
