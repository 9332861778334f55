"""Raised-cosine plucking excitation"""
import math

import numpy as np

from .String_Parameters import Excitation_Params


def excitation_force(t: float, e: Excitation_Params) -> float:
    """
    :param t: time in seconds
    :param e: excitation parameters
    :return: famp/2 (1 - cos(pi t / Te)) on the closed interval [0, Te], zero elsewhere
    """
    if 0.0 <= t <= e.Te:
        return 0.5 * e.famp * (1.0 - math.cos(math.pi * t / e.Te))
    return 0.0


def excitation_samples(n_steps: int, k: float, e: Excitation_Params, t_offset: float = 0.0) -> np.ndarray:
    """
    Samples of the driving function on the half grid, as consumed by one solver step each
    :param n_steps: number of samples
    :param k: time step
    :param e: excitation parameters
    :param t_offset: start time of the first step, used when integrating from the middle of a trajectory
    :return: f_e(t_offset + (n + 1/2) k) for n = 0..n_steps-1
    """
    t = t_offset + (np.arange(n_steps, dtype=np.float64) + 0.5) * k
    inside = (t >= 0.0) & (t <= e.Te)
    return np.where(inside, 0.5 * e.famp * (1.0 - np.cos(np.pi * t / e.Te)), 0.0)
