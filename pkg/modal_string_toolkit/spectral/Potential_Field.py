"""Capability shared by every nonlinearity the solver can integrate"""
from typing import Tuple

import numpy as np


class Potential_Field:
    """
        A conservative modal force f(q) = -grad V(q) with a non-negative potential V.
        Implementations accept a single state of shape (M,) or a batch of shape (..., M)
    """

    def __init__(self, M: int):
        self.M: int = M

    def potential(self, q: np.ndarray):
        """
        :param q: modal displacements
        :return: V(q) >= 0, scalar per state
        """
        raise NotImplementedError

    def force(self, q: np.ndarray) -> np.ndarray:
        """
        :param q: modal displacements
        :return: f(q) = -grad V(q)
        """
        raise NotImplementedError

    def force_and_potential(self, q: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        :param q: modal displacements
        :return: f(q) and V(q), computed together when the field shares intermediate work
        """
        return self.force(q), self.potential(q)

    def __call__(self, q: np.ndarray) -> np.ndarray:
        return self.force(q)


class Zero_Field(Potential_Field):
    """
        The linear string: no coupling between modes
    """

    def potential(self, q: np.ndarray):
        if q.ndim == 1:
            return 0.0
        return np.zeros(q.shape[:-1])

    def force(self, q: np.ndarray) -> np.ndarray:
        return np.zeros_like(q, dtype=np.float64)

    def __str__(self):
        return f"Zero_Field(M={self.M})"
