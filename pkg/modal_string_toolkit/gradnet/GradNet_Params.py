"""Learnable parameters of the single hidden layer gradient network and their gradients"""
import math
from typing import Tuple

import numpy as np

from ..errors import Invalid_Parameter_Error


class GradNet_Params:
    """
        W (H x M), bias b, and log-scaled vectors log_alpha, log_beta of f_theta(q) = -W^T [alpha * sigma(beta * W q + b)]
    """

    def __init__(self, W: np.ndarray, b: np.ndarray, log_alpha: np.ndarray, log_beta: np.ndarray, neg_slope: float = 0.01):
        H, M = W.shape
        if b.shape != (H,) or log_alpha.shape != (H,) or log_beta.shape != (H,):
            raise Invalid_Parameter_Error(f"Hidden vectors must have shape ({H},) but got {b.shape}, {log_alpha.shape}, {log_beta.shape}")
        if not neg_slope > 0.0:
            raise Invalid_Parameter_Error(f"Leaky ReLU slope must be positive but got {neg_slope}")
        self.W: np.ndarray = np.asarray(W, dtype=np.float64)
        self.b: np.ndarray = np.asarray(b, dtype=np.float64)
        self.log_alpha: np.ndarray = np.asarray(log_alpha, dtype=np.float64)
        self.log_beta: np.ndarray = np.asarray(log_beta, dtype=np.float64)
        self.neg_slope: float = float(neg_slope)

    @property
    def H(self) -> int:
        """
        :return: hidden dimension
        """
        return self.W.shape[0]

    @property
    def M(self) -> int:
        """
        :return: number of modes the network acts on
        """
        return self.W.shape[1]

    @property
    def alpha(self) -> np.ndarray:
        return np.exp(self.log_alpha)

    @property
    def beta(self) -> np.ndarray:
        return np.exp(self.log_beta)

    @property
    def ratio(self) -> np.ndarray:
        """
        :return: alpha/beta computed as exp(log_alpha - log_beta) so that no division is performed
        """
        return np.exp(self.log_alpha - self.log_beta)

    @property
    def size(self) -> int:
        """
        :return: total number of learnable scalars
        """
        return self.H * self.M + 3 * self.H

    def arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """
        :return: W, b, log_alpha, log_beta in checkpoint order
        """
        return self.W, self.b, self.log_alpha, self.log_beta

    def flatten(self) -> np.ndarray:
        """
        :return: all learnable scalars in one vector, W row-major first
        """
        return np.concatenate([a.ravel() for a in self.arrays()])

    def unflatten(self, vector: np.ndarray):
        """
        :param vector: learnable scalars in flatten() order
        :return: parameters with the same shape and slope holding the given values
        """
        assert vector.shape == (self.size,), f"Expected {self.size} values but got {vector.shape}"
        H, M = self.H, self.M
        W = vector[:H * M].reshape(H, M)
        b, log_alpha, log_beta = vector[H * M:].reshape(3, H)
        return GradNet_Params(W.copy(), b.copy(), log_alpha.copy(), log_beta.copy(), self.neg_slope)

    def copy(self):
        """
        :return: deep copy of the parameters
        """
        return GradNet_Params(self.W.copy(), self.b.copy(), self.log_alpha.copy(), self.log_beta.copy(), self.neg_slope)

    def __eq__(self, other):
        if not isinstance(other, GradNet_Params):
            return False
        return self.neg_slope == other.neg_slope and all(a.shape == o.shape and np.array_equal(a, o) for a, o in zip(self.arrays(), other.arrays()))

    def __str__(self):
        return f"GradNet_Params(M={self.M}, H={self.H}, neg_slope={self.neg_slope})"

    def __repr__(self):
        return str(self)


class GradNet_Gradients:
    """
        Gradient record with one array per learnable parameter of GradNet_Params
    """

    def __init__(self, dW: np.ndarray, db: np.ndarray, dlog_alpha: np.ndarray, dlog_beta: np.ndarray):
        self.dW: np.ndarray = dW
        self.db: np.ndarray = db
        self.dlog_alpha: np.ndarray = dlog_alpha
        self.dlog_beta: np.ndarray = dlog_beta

    @staticmethod
    def zeros_like(params: GradNet_Params):
        """
        :param params: parameters to mirror
        :return: zero gradients shaped like params
        """
        return GradNet_Gradients(np.zeros_like(params.W), np.zeros_like(params.b), np.zeros_like(params.log_alpha), np.zeros_like(params.log_beta))

    def arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """
        :return: dW, db, dlog_alpha, dlog_beta in parameter order
        """
        return self.dW, self.db, self.dlog_alpha, self.dlog_beta

    def flatten(self) -> np.ndarray:
        """
        :return: gradient vector aligned with GradNet_Params.flatten()
        """
        return np.concatenate([a.ravel() for a in self.arrays()])

    def norm(self) -> float:
        return float(np.linalg.norm(self.flatten()))

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays())

    def __add__(self, other):
        return GradNet_Gradients(*(a + o for a, o in zip(self.arrays(), other.arrays())))

    def __mul__(self, scale: float):
        return GradNet_Gradients(*(a * scale for a in self.arrays()))

    __rmul__ = __mul__

    def __str__(self):
        return f"GradNet_Gradients(norm={self.norm():1.3e})"


def kaiming_gain(neg_slope: float) -> float:
    """
    :param neg_slope: negative slope of the leaky ReLU
    :return: gain sqrt(2 / (1 + neg_slope^2))
    """
    return math.sqrt(2.0 / (1.0 + neg_slope ** 2))


def gradnet_init(M: int, H: int, neg_slope: float, rng: np.random.Generator, log_scale_std: float = 0.01) -> GradNet_Params:
    """
    Kaiming-normal weights with fan-in M, zero biases and log scales drawn around zero
    :param M: number of modes
    :param H: hidden dimension
    :param neg_slope: leaky ReLU negative slope
    :param rng: random generator
    :param log_scale_std: standard deviation of log_alpha and log_beta
    :return: initial parameters
    """
    if H < 1:
        raise Invalid_Parameter_Error(f"Hidden dimension must be at least 1 but got {H}")
    std = kaiming_gain(neg_slope) / math.sqrt(M)
    W = rng.normal(0.0, std, size=(H, M))
    log_alpha = rng.normal(0.0, log_scale_std, size=H)
    log_beta = rng.normal(0.0, log_scale_std, size=H)
    return GradNet_Params(W, np.zeros(H), log_alpha, log_beta, neg_slope)
