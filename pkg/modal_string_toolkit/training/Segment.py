"""Teacher-forced segments of target trajectories"""
from typing import List, Optional

import numpy as np

from ..errors import Invalid_Parameter_Error
from ..solver.Solver_Config import Solver_Config
from ..solver.Trajectory import Trajectory
from ..string_model.Modal_Operators import Modal_Operators, mode_shape
from ..string_model.String_Parameters import Excitation_Params
from ..string_model.excitation import excitation_samples


class Segment_Context:
    """
        Solver constants shared by every segment of one target trajectory
    """

    def __init__(self, ops: Modal_Operators, nu: float, excitation: Excitation_Params, config: Solver_Config, input_gain: Optional[np.ndarray] = None):
        self.ops: Modal_Operators = ops
        self.Sigma: np.ndarray = ops.Sigma
        self.Omega2: np.ndarray = ops.Omega2
        self.nu: float = float(nu)
        self.excitation: Excitation_Params = excitation
        self.config: Solver_Config = config
        self.input_gain: np.ndarray = mode_shape(excitation.xe, ops.M) if input_gain is None else input_gain

    @property
    def M(self) -> int:
        return self.Sigma.shape[0]

    @property
    def k(self) -> float:
        return self.config.k


class Segment:
    """
        A window [start, start + L) of a target trajectory: the first state is the true initial condition,
        the remaining L - 1 states are predicted by as many solver steps
    """

    def __init__(self, start: int, q: np.ndarray, p: np.ndarray, forcing: np.ndarray, k: float, context: Optional[Segment_Context] = None,
                 trajectory_index: int = 0):
        """
        :param start: index of the first state in the trajectory
        :param q: target displacements, shape (L, M)
        :param p: target velocities, shape (L, M)
        :param forcing: excitation samples f_e at the half steps of the segment, shape (L - 1,)
        :param k: time step
        :param context: solver constants of the trajectory
        :param trajectory_index: position of the trajectory in its dataset
        """
        assert q.shape == p.shape and q.ndim == 2, f"Expected matching (L, M) targets but got {q.shape} and {p.shape}"
        assert forcing.shape == (q.shape[0] - 1,), f"Expected {q.shape[0] - 1} forcing samples but got {forcing.shape}"
        self.start: int = start
        self.q: np.ndarray = q
        self.p: np.ndarray = p
        self.forcing: np.ndarray = forcing
        self.k: float = k
        self.context: Optional[Segment_Context] = context
        self.trajectory_index: int = trajectory_index

    @property
    def length(self) -> int:
        return self.q.shape[0]

    @property
    def steps(self) -> int:
        return self.length - 1

    @property
    def q0(self) -> np.ndarray:
        return self.q[0]

    @property
    def p0(self) -> np.ndarray:
        return self.p[0]

    @property
    def t_offset(self) -> float:
        """
        :return: time of the first state, by which the excitation is shifted
        """
        return self.start * self.k

    def __len__(self):
        return self.length

    def __str__(self):
        return f"Segment(trajectory={self.trajectory_index}, start={self.start}, length={self.length})"


def segment_length(fs: float, segment_ms: float = 1.0) -> int:
    """
    :return: number of solver steps in a segment of the given duration, at least 1
    """
    return max(1, int(round(fs * segment_ms / 1000.0)))


def segment_dataset(trajectory: Trajectory, fs: float, context: Optional[Segment_Context] = None, segment_ms: float = 1.0,
                    trajectory_index: int = 0) -> List[Segment]:
    """
    Split a trajectory into segments of segment_length steps, the last one possibly shorter. Each segment starts
    from the last state of the one before, so every solver step of the trajectory is predicted by exactly one segment.
    :param trajectory: target trajectory stored at every solver step
    :param fs: sampling rate the segments are trained at
    :param context: solver constants of the trajectory
    :param segment_ms: segment duration in milliseconds
    :param trajectory_index: position of the trajectory in its dataset
    :return: segments covering the trajectory in order
    """
    if trajectory.decimation != 1:
        raise Invalid_Parameter_Error(f"Segments need every solver step but the trajectory is decimated by {trajectory.decimation}")
    if trajectory.fs != fs:
        raise Invalid_Parameter_Error(f"Trajectory was simulated at {trajectory.fs:g} Hz, not at {fs:g} Hz")
    k = 1.0 / fs
    L = segment_length(fs, segment_ms)
    segments = []
    for start in range(0, trajectory.N - 1, L):
        stop = min(start + L + 1, trajectory.N)
        forcing = excitation_samples(stop - start - 1, k, trajectory.excitation, t_offset=start * k)
        segments.append(Segment(start, trajectory.q[start:stop], trajectory.p[start:stop], forcing, k, context, trajectory_index))
    return segments


class Segment_Batch:
    """
        Segments stacked along a leading batch axis, padded to the longest segment
    """

    def __init__(self, segments: List[Segment]):
        assert len(segments) > 0, "A batch needs at least one segment"
        assert all(s.context is not None for s in segments), "Every segment of a batch needs its solver context"
        configs = {s.context.config for s in segments}
        assert len(configs) == 1, f"Segments of one batch must share the solver settings but got {configs}"
        self.segments: List[Segment] = segments
        self.config: Solver_Config = segments[0].context.config
        B, M = len(segments), segments[0].context.M
        L = max(s.length for s in segments)
        self.lengths: np.ndarray = np.array([s.length for s in segments])
        self.q: np.ndarray = np.zeros((B, L, M))
        self.p: np.ndarray = np.zeros((B, L, M))
        self.forcing: np.ndarray = np.zeros((B, L - 1))
        for i, s in enumerate(segments):
            self.q[i, :s.length] = s.q
            self.p[i, :s.length] = s.p
            self.forcing[i, :s.length - 1] = s.forcing
        self.Sigma: np.ndarray = np.stack([s.context.Sigma for s in segments])
        self.Omega2: np.ndarray = np.stack([s.context.Omega2 for s in segments])
        self.nu: np.ndarray = np.array([s.context.nu for s in segments])
        self.input_gain: np.ndarray = np.stack([s.context.input_gain for s in segments])

    @property
    def B(self) -> int:
        return self.q.shape[0]

    @property
    def L(self) -> int:
        return self.q.shape[1]

    @property
    def M(self) -> int:
        return self.q.shape[2]

    @property
    def k(self) -> float:
        return self.config.k

    def mask(self) -> np.ndarray:
        """
        :return: (B, L) flags of the states that belong to their segment
        """
        return np.arange(self.L)[None, :] < self.lengths[:, None]

    def subset(self, keep: np.ndarray):
        """
        :param keep: boolean flag per segment
        :return: batch of the flagged segments
        """
        return Segment_Batch([s for s, flag in zip(self.segments, keep) if flag])

    def __len__(self):
        return self.B
