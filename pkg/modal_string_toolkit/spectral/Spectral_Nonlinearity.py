"""Closed-form modal nonlinearity of the transverse string by the spectral method"""
import functools
from typing import Tuple

import numpy as np

from ..errors import Invalid_Parameter_Error
from .Potential_Field import Potential_Field
from .Spectral_Grid import Spectral_Grid, spatial_gradient
from .morse_potential import morse_potential, morse_potential_deriv


class Spectral_Nonlinearity(Potential_Field):
    """
        Oracle physics: f(q) = -(1/sqrt(M+1)) B C V'(xi) with potential V(q) = mean of V(xi) over the grid
    """

    def __init__(self, M: int, grid: Spectral_Grid = None):
        super().__init__(M)
        if grid is None:
            grid = Spectral_Grid(M)
        self.grid: Spectral_Grid = grid

    def _check(self, q: np.ndarray):
        if q.shape[-1] != self.M:
            raise Invalid_Parameter_Error(f"Expected {self.M} modes but got q of shape {q.shape}")

    def slopes(self, q: np.ndarray) -> np.ndarray:
        """
        :param q: modal displacements
        :return: slope xi of the string on the grid points
        """
        return spatial_gradient(q, self.grid, self.grid.wavenumbers)

    def potential(self, q: np.ndarray):
        self._check(q)
        return morse_potential(self.slopes(q)).sum(axis=-1) / (self.M + 1)

    def force(self, q: np.ndarray) -> np.ndarray:
        self._check(q)
        return self._force_from_slopes(self.slopes(q))

    def force_and_potential(self, q: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        self._check(q)
        xi = self.slopes(q)
        return self._force_from_slopes(xi), morse_potential(xi).sum(axis=-1) / (self.M + 1)

    def _force_from_slopes(self, xi: np.ndarray) -> np.ndarray:
        return -(morse_potential_deriv(xi) @ self.grid.C.T) * self.grid.wavenumbers / self.grid.root_size

    def __str__(self):
        return f"Spectral_Nonlinearity(M={self.M})"


@functools.lru_cache(maxsize=None)
def spectral_field(M: int) -> Spectral_Nonlinearity:
    """
    :param M: number of modes
    :return: shared spectral field for M modes, built once per M
    """
    return Spectral_Nonlinearity(M)


def oracle_force(q: np.ndarray) -> np.ndarray:
    """
    :param q: modal displacements, shape (..., M)
    :return: spectral nonlinear force for M = q.shape[-1] modes
    """
    return spectral_field(q.shape[-1]).force(q)


def oracle_potential(q: np.ndarray):
    """
    :param q: modal displacements, shape (..., M)
    :return: spectral potential for M = q.shape[-1] modes
    """
    return spectral_field(q.shape[-1]).potential(q)
