"""Truncated orthonormal DCT-II on the staggered spatial grid"""
import math

import numpy as np

from ..errors import Invalid_Parameter_Error


def dct_matrix(M: int) -> np.ndarray:
    """
    :param M: number of modes
    :return: M x (M+1) matrix [C]_ml = sqrt(2/(M+1)) cos(pi m (l + 1/2) / (M+1)) for m = 1..M, l = 0..M
    """
    assert M >= 1, f"Expected at least one mode but got {M}"
    m = np.arange(1, M + 1, dtype=np.float64)[:, np.newaxis]
    l_half = np.arange(0, M + 1, dtype=np.float64)[np.newaxis, :] + 0.5
    return math.sqrt(2.0 / (M + 1)) * np.cos(math.pi / (M + 1) * m * l_half)


class Spectral_Grid:
    """
        Grid points x_{l+1/2} = (l + 1/2)/(M+1) together with the DCT matrix that maps modal derivatives onto them
    """

    def __init__(self, M: int, C: np.ndarray = None):
        if C is None:
            C = dct_matrix(M)
        assert C.shape == (M, M + 1), f"Expected C of shape {(M, M + 1)} but got {C.shape}"
        self.M: int = M
        self.C: np.ndarray = C
        self.points: np.ndarray = (np.arange(M + 1, dtype=np.float64) + 0.5) / (M + 1)
        self.wavenumbers: np.ndarray = math.pi * np.arange(1, M + 1, dtype=np.float64)
        self.root_size: float = math.sqrt(M + 1)

    def __len__(self):
        return self.M + 1


def spatial_gradient(q: np.ndarray, grid: Spectral_Grid, B: np.ndarray) -> np.ndarray:
    """
    :param q: modal displacements, shape (..., M)
    :param grid: spectral grid
    :param B: modal wavenumbers
    :return: xi = sqrt(M+1) C^T B q, the slope of the string on the grid points, shape (..., M+1)
    """
    if q.shape[-1] != grid.M or B.shape != (grid.M,):
        raise Invalid_Parameter_Error(f"Expected {grid.M} modes but got q of shape {q.shape} and B of shape {B.shape}")
    return grid.root_size * ((q * B) @ grid.C)
