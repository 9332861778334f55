"""Fundamental frequency estimates from zero crossings"""
import numpy as np
from pydantic import BaseModel

from ..errors import Undefined_Metric_Error
from ..solver.Trajectory import Trajectory


def estimate_fundamental(signal: np.ndarray, fs: float) -> float:
    """
    Average period between upward zero crossings, located by linear interpolation
    :param signal: mono series
    :param fs: sampling rate
    :return: frequency in Hz
    :raises Undefined_Metric_Error: fewer than two upward crossings
    """
    x = np.asarray(signal, dtype=np.float64)
    crossings = np.nonzero((x[:-1] < 0.0) & (x[1:] >= 0.0))[0]
    if crossings.shape[0] < 2:
        raise Undefined_Metric_Error(f"Need two upward zero crossings to estimate a frequency but found {crossings.shape[0]}")
    times = crossings + x[crossings] / (x[crossings] - x[crossings + 1])
    return float((times.shape[0] - 1) * fs / (times[-1] - times[0]))


class Pitch_Glide(BaseModel):
    """
        Fundamental over the start and over the end of a rollout
    """
    initial_hz: float
    final_hz: float

    @property
    def relative_drop(self) -> float:
        """
        :return: initial_hz / final_hz - 1
        """
        return self.initial_hz / self.final_hz - 1.0


def pitch_glide(trajectory: Trajectory, initial_seconds: float = 0.1, final_seconds: float = 0.5, mode: int = 1) -> Pitch_Glide:
    """
    :param trajectory: rollout, longer than initial_seconds + final_seconds
    :param initial_seconds: duration of the initial window
    :param final_seconds: duration of the final window
    :param mode: 1-based index of the mode whose displacement is analysed
    :return: fundamentals of the initial and final windows
    """
    fs = trajectory.sample_rate
    n_initial, n_final = int(round(initial_seconds * fs)), int(round(final_seconds * fs))
    if n_initial + n_final > trajectory.N:
        raise Undefined_Metric_Error(f"Windows of {n_initial} and {n_final} samples do not fit a trajectory of {trajectory.N}")
    q = trajectory.q[:, mode - 1]
    return Pitch_Glide(initial_hz=estimate_fundamental(q[:n_initial], fs), final_hz=estimate_fundamental(q[-n_final:], fs))
