"""Adam with bias correction over the flattened network parameters"""
import numpy as np

from ..gradnet.GradNet_Params import GradNet_Gradients, GradNet_Params
from .Train_Config import Adam_Config


class Adam_State:
    """
        First and second moment accumulators aligned with GradNet_Params.flatten(), and the step counter
    """

    def __init__(self, size: int, config: Adam_Config = None):
        self.config: Adam_Config = Adam_Config() if config is None else config
        self.m: np.ndarray = np.zeros(size)
        self.v: np.ndarray = np.zeros(size)
        self.t: int = 0

    @staticmethod
    def for_params(params: GradNet_Params, config: Adam_Config = None):
        return Adam_State(params.size, config)

    def __str__(self):
        return f"Adam_State(t={self.t}, lr={self.config.lr:g})"


def adam_step(params: GradNet_Params, grads: GradNet_Gradients, state: Adam_State) -> GradNet_Params:
    """
    :param params: current parameters
    :param grads: loss gradient at the current parameters
    :param state: moment accumulators, advanced in place
    :return: updated parameters
    """
    g = grads.flatten()
    assert g.shape == state.m.shape, f"Gradient of {g.shape[0]} values does not match optimiser state of {state.m.shape[0]}"
    c = state.config
    state.t += 1
    state.m = c.beta1 * state.m + (1.0 - c.beta1) * g
    state.v = c.beta2 * state.v + (1.0 - c.beta2) * g * g
    m_hat = state.m / (1.0 - c.beta1 ** state.t)
    v_hat = state.v / (1.0 - c.beta2 ** state.t)
    return params.unflatten(params.flatten() - c.lr * m_hat / (np.sqrt(v_hat) + c.eps))
