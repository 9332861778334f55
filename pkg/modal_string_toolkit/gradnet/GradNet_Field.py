"""Learned nonlinearity exposed as a potential field"""
from typing import Tuple

import numpy as np

from ..spectral.Potential_Field import Potential_Field
from .GradNet_Params import GradNet_Params
from .gradnet_functions import gradnet_force, gradnet_potential


class GradNet_Field(Potential_Field):
    """
        Potential_Field backed by a gradient network, so the solver runs on learned physics unchanged
    """

    def __init__(self, params: GradNet_Params):
        super().__init__(params.M)
        self.params: GradNet_Params = params

    def potential(self, q: np.ndarray):
        return gradnet_potential(q, self.params)

    def force(self, q: np.ndarray) -> np.ndarray:
        return gradnet_force(q, self.params)

    def force_and_potential(self, q: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        force, tape = gradnet_force(q, self.params, return_tape=True)
        return force, gradnet_potential(q, self.params, tape)

    def __str__(self):
        return f"GradNet_Field({self.params})"
