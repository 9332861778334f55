"""Shared fixtures: a small stiff string that is cheap to simulate and strongly nonlinear"""
import numpy as np
import pytest

from modal_string_toolkit.dataset.Dataset_Spec import Dataset_Role, desk_evaluation_spec, desk_training_spec
from modal_string_toolkit.solver.Solver_Config import Solver_Config
from modal_string_toolkit.string_model.Modal_Operators import build_modal_operators
from modal_string_toolkit.string_model.String_Parameters import Excitation_Params, Scaled_String_Params


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def string():
    return Scaled_String_Params(gamma=164.82, kappa=1.03, nu=164.82, sigma0=3.0, sigma1_hat=2e-4, M=6)


@pytest.fixture
def lossless_string():
    return Scaled_String_Params(gamma=164.82, kappa=1.03, nu=164.82, sigma0=0.0, sigma1_hat=0.0, M=6)


@pytest.fixture
def ops(string):
    return build_modal_operators(string)


@pytest.fixture
def excitation():
    return Excitation_Params(famp=3e4, Te=1e-3, xe=0.25, xo=0.7)


@pytest.fixture
def silence():
    return Excitation_Params(famp=0.0, Te=1e-3, xe=0.25, xo=0.7)


@pytest.fixture
def config():
    return Solver_Config(fs=32000.0)


@pytest.fixture
def tiny_train_spec():
    return desk_training_spec(count=2, seed=5, T_sim=0.01)


@pytest.fixture
def tiny_val_spec():
    return desk_evaluation_spec(Dataset_Role.Validation, count=1, seed=6, T_sim=0.01)
