"""Trajectory losses over the state y = [q, p], the auxiliary variable excluded"""
import numpy as np

from ..errors import Invalid_Parameter_Error


def stack_states(q: np.ndarray, p: np.ndarray) -> np.ndarray:
    """
    :return: states y^n = [q^n, p^n], shape (N, 2M)
    """
    return np.concatenate([q, p], axis=-1)


def mse_loss(predicted: np.ndarray, target: np.ndarray) -> float:
    """
    :param predicted: predicted states, shape (N, K)
    :param target: target states, shape (N, K)
    :return: sum of squared differences divided by K N
    """
    if predicted.shape != target.shape:
        raise Invalid_Parameter_Error(f"Predicted states {predicted.shape} do not match target states {target.shape}")
    N, K = target.shape
    difference = predicted - target
    return float(np.sum(difference * difference) / (K * N))


def segment_losses(q: np.ndarray, p: np.ndarray, target_q: np.ndarray, target_p: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """
    Batched mse_loss over padded segments
    :param q: predicted displacements, shape (B, L, M)
    :param p: predicted velocities, shape (B, L, M)
    :param target_q: target displacements
    :param target_p: target velocities
    :param mask: (B, L) flags of the states inside each segment
    :return: loss of every segment
    """
    M = q.shape[-1]
    squared = np.sum((q - target_q) ** 2 + (p - target_p) ** 2, axis=-1)
    return np.where(mask, squared, 0.0).sum(axis=-1) / (2 * M * mask.sum(axis=-1))
