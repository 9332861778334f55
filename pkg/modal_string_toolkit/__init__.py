"""
Modal String Toolkit - differentiable modal synthesis of nonlinear strings.

This package simulates a stiff, lossy string with a tension-modulated nonlinearity in a truncated
modal basis, and learns that nonlinearity from simulated data. The main components are organized
into several submodules:

- string_model: physical and scaled parameters, modal operators and the plucking excitation
- spectral: the spectral-method nonlinearity used to generate reference data
- gradnet: the gradient network that replaces it, with its checkpoint format
- solver: the energy-conserving scalar auxiliary variable solver and trajectory files
- training: teacher-forced segments, reverse-mode gradients, Adam and the epoch loop
- dataset: parameter ranges, trajectory generation and dataset directories
- evaluation: relative error metrics, pitch glide, WAV and spectrogram rendering
- cli: the modal-string command line and its configuration files
"""

from .errors import (
    Modal_String_Error,
    Invalid_Parameter_Error,
    Stability_Error,
    Solver_Diverged_Error,
    Training_Diverged_Error,
)

from .string_model.String_Parameters import Physical_String_Params, Scaled_String_Params, Excitation_Params, scale_physical_params
from .string_model.Modal_Operators import Modal_Operators, build_modal_operators

from .spectral.Potential_Field import Potential_Field, Zero_Field
from .spectral.Spectral_Nonlinearity import Spectral_Nonlinearity

from .gradnet.GradNet_Params import GradNet_Params, gradnet_init
from .gradnet.GradNet_Field import GradNet_Field

from .solver.Solver_Config import Solver_Config
from .solver.SAV_Solver import SAV_Solver
from .solver.Trajectory import Trajectory

from .training.Train_Config import Train_Config
from .training.Trainer import Trainer, train

from .dataset.Dataset_Spec import Dataset_Spec, Dataset_Role
from .dataset.Dataset import Dataset, generate

from .evaluation.evaluation_runner import evaluate_dataset

# Define what should be accessible when doing 'from modal_string_toolkit import *'
__all__ = [
    # Errors
    'Modal_String_Error',
    'Invalid_Parameter_Error',
    'Stability_Error',
    'Solver_Diverged_Error',
    'Training_Diverged_Error',

    # String model
    'Physical_String_Params',
    'Scaled_String_Params',
    'Excitation_Params',
    'scale_physical_params',
    'Modal_Operators',
    'build_modal_operators',

    # Nonlinearities
    'Potential_Field',
    'Zero_Field',
    'Spectral_Nonlinearity',
    'GradNet_Params',
    'gradnet_init',
    'GradNet_Field',

    # Simulation
    'Solver_Config',
    'SAV_Solver',
    'Trajectory',

    # Learning and data
    'Train_Config',
    'Trainer',
    'train',
    'Dataset_Spec',
    'Dataset_Role',
    'Dataset',
    'generate',
    'evaluate_dataset',
]
