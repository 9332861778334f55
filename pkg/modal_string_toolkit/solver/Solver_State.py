"""State of the SAV scheme at an integer time step"""
import numpy as np


class Solver_State:
    """
        Modal displacements q^n, velocities p^n and auxiliary variable psi^n
    """

    def __init__(self, q: np.ndarray, p: np.ndarray, psi: float):
        assert q.shape == p.shape, f"Displacement shape {q.shape} does not match velocity shape {p.shape}"
        self.q: np.ndarray = q
        self.p: np.ndarray = p
        self.psi: float = float(psi)

    @staticmethod
    def rest(M: int, eps: float):
        """
        :param M: number of modes
        :param eps: gauge constant
        :return: the rest state (0, 0, sqrt(eps)) of a field with V(0) = 0
        """
        return Solver_State(np.zeros(M), np.zeros(M), np.sqrt(eps))

    @property
    def M(self) -> int:
        return self.q.shape[0]

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.p)) and np.isfinite(self.psi))

    def copy(self):
        return Solver_State(self.q.copy(), self.p.copy(), self.psi)

    def __eq__(self, other):
        return isinstance(other, Solver_State) and np.array_equal(self.q, other.q) and np.array_equal(self.p, other.p) and self.psi == other.psi

    def __str__(self):
        return f"Solver_State(|q|={np.linalg.norm(self.q):1.3e}, |p|={np.linalg.norm(self.p):1.3e}, psi={self.psi:1.6e})"

    def __repr__(self):
        return str(self)
