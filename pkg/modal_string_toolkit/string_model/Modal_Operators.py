"""Diagonal modal operators of the simply supported stiff string"""
import math
from typing import Tuple

import numpy as np

from ..errors import Invalid_Parameter_Error
from ..spectral.Spectral_Grid import dct_matrix
from .String_Parameters import Scaled_String_Params


class Modal_Operators:
    """
        Wavenumbers B, loss Sigma and squared angular frequencies Omega2 stored as diagonals, plus the truncated DCT-II matrix C
    """

    def __init__(self, B: np.ndarray, Sigma: np.ndarray, Omega2: np.ndarray, C: np.ndarray):
        assert B.shape == Sigma.shape == Omega2.shape, f"Diagonal shapes differ: {B.shape}, {Sigma.shape}, {Omega2.shape}"
        assert C.shape == (B.shape[0], B.shape[0] + 1), f"Expected C of shape {(B.shape[0], B.shape[0] + 1)} but got {C.shape}"
        self.B: np.ndarray = B
        self.Sigma: np.ndarray = Sigma
        self.Omega2: np.ndarray = Omega2
        self.C: np.ndarray = C

    @property
    def M(self) -> int:
        """
        :return: number of modes
        """
        return self.B.shape[0]

    @property
    def Omega(self) -> np.ndarray:
        """
        :return: modal angular frequencies of the lossless linear string
        """
        return np.sqrt(self.Omega2)

    def modal_frequencies(self) -> np.ndarray:
        """
        :return: modal frequencies in Hz
        """
        return self.Omega / (2.0 * math.pi)

    def __len__(self):
        return self.M

    def __str__(self):
        return f"Modal_Operators(M={self.M}, f1={self.modal_frequencies()[0]:1.2f} Hz)"

    def __repr__(self):
        return str(self)


def build_modal_operators(s: Scaled_String_Params) -> Modal_Operators:
    """
    :param s: scaled string parameters
    :return: the diagonal operators Sigma = sigma0 + sigma1 B^2 and Omega2 = gamma^2 B^2 + kappa^2 B^4
    """
    B = math.pi * np.arange(1, s.M + 1, dtype=np.float64)
    B2 = B * B
    Sigma = s.sigma0 + s.sigma1_hat * B2
    Omega2 = s.gamma ** 2 * B2 + s.kappa ** 2 * B2 * B2
    return Modal_Operators(B, Sigma, Omega2, dct_matrix(s.M))


def mode_shape(x: float, M: int) -> np.ndarray:
    """
    :param x: normalised position on the string
    :param M: number of modes
    :return: vector of sqrt(2) sin(m pi x) for m = 1..M
    """
    if not 0.0 <= x <= 1.0:
        raise Invalid_Parameter_Error(f"Position must lie in [0, 1] but got {x}")
    m = np.arange(1, M + 1, dtype=np.float64)
    return math.sqrt(2.0) * np.sin(m * math.pi * x)


def check_stability(ops: Modal_Operators, k: float) -> Tuple[bool, float]:
    """
    The scheme is stable when the highest modal frequency satisfies Omega_M < 2/k
    :param ops: modal operators
    :param k: time step in seconds
    :return: True if stable, and the margin 2/k - Omega_M
    """
    assert k > 0.0, f"Time step must be positive but got {k}"
    omega_max = math.sqrt(float(ops.Omega2[-1]))
    return omega_max * k < 2.0, 2.0 / k - omega_max
