"""Stored rollouts of the solver"""
import numpy as np

from ..spectral.Potential_Field import Potential_Field
from ..string_model.String_Parameters import Excitation_Params
from .Solver_State import Solver_State


class Trajectory:
    """
        States (q^n, p^n, psi^n) at integer times and the audio output w^n = Phi(xo)^T q^n of one rollout
    """

    def __init__(self, q: np.ndarray, p: np.ndarray, psi: np.ndarray, w: np.ndarray, fs: float, excitation: Excitation_Params,
                 lambda0: float = 1.0, eps: float = 1e-12, decimation: int = 1):
        """
        :param q: displacements, shape (N, M)
        :param p: velocities, shape (N, M)
        :param psi: auxiliary variable, shape (N,)
        :param w: audio output, shape (N,)
        :param fs: sampling rate of the solver that produced the rollout
        :param excitation: excitation and pickup used for the rollout
        :param lambda0: control gain of the rollout
        :param eps: gauge constant of the rollout
        :param decimation: number of solver steps between stored samples
        """
        assert q.ndim == 2 and q.shape == p.shape, f"Expected matching (N, M) arrays but got {q.shape} and {p.shape}"
        assert psi.shape == w.shape == (q.shape[0],), f"Expected series of length {q.shape[0]} but got {psi.shape} and {w.shape}"
        assert decimation >= 1, f"Decimation must be at least 1 but got {decimation}"
        self.q: np.ndarray = q
        self.p: np.ndarray = p
        self.psi: np.ndarray = psi
        self.w: np.ndarray = w
        self.fs: float = float(fs)
        self.excitation: Excitation_Params = excitation
        self.lambda0: float = float(lambda0)
        self.eps: float = float(eps)
        self.decimation: int = int(decimation)

    @property
    def N(self) -> int:
        """
        :return: number of stored samples
        """
        return self.q.shape[0]

    @property
    def M(self) -> int:
        return self.q.shape[1]

    @property
    def sample_rate(self) -> float:
        """
        :return: rate of the stored samples, fs divided by the decimation
        """
        return self.fs / self.decimation

    @property
    def duration(self) -> float:
        return self.N / self.sample_rate

    def times(self) -> np.ndarray:
        return np.arange(self.N, dtype=np.float64) / self.sample_rate

    def state(self, n: int) -> Solver_State:
        """
        :param n: stored sample index
        :return: copy of the state at that sample
        """
        return Solver_State(self.q[n].copy(), self.p[n].copy(), float(self.psi[n]))

    def slice(self, start: int, stop: int):
        """
        :return: trajectory of the stored samples start..stop-1
        """
        assert 0 <= start < stop <= self.N, f"Invalid window [{start}, {stop}) of a trajectory with {self.N} samples"
        return Trajectory(self.q[start:stop], self.p[start:stop], self.psi[start:stop], self.w[start:stop], self.fs, self.excitation,
                          self.lambda0, self.eps, self.decimation)

    def psi_drift(self, field: Potential_Field) -> np.ndarray:
        """
        :param field: field the rollout was integrated with
        :return: |psi^n - sqrt(2 V(q^n) + eps)| per stored sample
        """
        return np.abs(self.psi - np.sqrt(2.0 * np.asarray(field.potential(self.q)) + self.eps))

    def mean_psi_drift(self, field: Potential_Field) -> float:
        return float(np.mean(self.psi_drift(field)))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.p)) and np.all(np.isfinite(self.psi)) and np.all(np.isfinite(self.w)))

    def __len__(self):
        return self.N

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return False
        return (np.array_equal(self.q, other.q) and np.array_equal(self.p, other.p) and np.array_equal(self.psi, other.psi)
                and np.array_equal(self.w, other.w) and self.fs == other.fs and self.excitation == other.excitation
                and self.lambda0 == other.lambda0 and self.eps == other.eps and self.decimation == other.decimation)

    def __str__(self):
        return f"Trajectory(N={self.N}, M={self.M}, fs={self.fs:g}, decimation={self.decimation})"

    def __repr__(self):
        return str(self)


class Trajectory_Recorder:
    """
        Preallocated storage that keeps every r-th state of a rollout
    """

    def __init__(self, N: int, M: int, output_gain: np.ndarray, decimation: int = 1):
        """
        :param N: number of solver states of the rollout, including the initial state
        :param M: number of modes
        :param output_gain: pickup vector Phi(xo)
        :param decimation: keep the states n = 0, r, 2r, ...
        """
        assert N >= 1, f"A rollout holds at least the initial state but got N={N}"
        assert decimation >= 1, f"Decimation must be at least 1 but got {decimation}"
        self.decimation: int = decimation
        self.output_gain: np.ndarray = output_gain
        size = (N - 1) // decimation + 1
        self.q: np.ndarray = np.zeros((size, M))
        self.p: np.ndarray = np.zeros((size, M))
        self.psi: np.ndarray = np.zeros(size)
        self._count: int = 0

    def record(self, n: int, state: Solver_State):
        """
        :param n: solver step index of the state
        :param state: state to store if n is a multiple of the decimation
        """
        if n % self.decimation != 0:
            return
        self.q[self._count] = state.q
        self.p[self._count] = state.p
        self.psi[self._count] = state.psi
        self._count += 1

    def __len__(self):
        return self._count

    def trajectory(self, fs: float, excitation: Excitation_Params, lambda0: float, eps: float) -> Trajectory:
        """
        :return: trajectory of the recorded states with the audio output computed from the stored displacements
        """
        q, p, psi = self.q[:self._count], self.p[:self._count], self.psi[:self._count]
        return Trajectory(q, p, psi, q @ self.output_gain, fs, excitation, lambda0, eps, self.decimation)
