"""TOML run configuration and environment settings of the command line"""
import os
import tomllib
from pathlib import Path
from typing import Optional, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..dataset.Dataset_Spec import Dataset_Role, Dataset_Spec, desk_evaluation_spec, desk_training_spec
from ..errors import Invalid_Parameter_Error
from ..evaluation.audio_rendering import Render_Mode
from ..solver.Solver_Config import Solver_Config
from ..string_model.String_Parameters import Excitation_Params, Physical_String_Params, Scaled_String_Params, scale_excitation_amplitude, \
    scale_physical_params
from ..training.Train_Config import Train_Config

WORKERS_VARIABLE = "MODAL_STRING_WORKERS"


class Physical_String_Section(Physical_String_Params):
    """
        Physical string with its mode count and, optionally, an excitation amplitude in newtons
    """
    M: int = Field(20, ge=1)
    famp_newton: Optional[float] = Field(None, ge=0.0)


class Dataset_Section(BaseModel):
    """
        Mode count and the specs of the three splits
    """
    model_config = ConfigDict(frozen=True)

    M: int = Field(20, ge=1)
    train: Dataset_Spec = Field(default_factory=desk_training_spec)
    validation: Dataset_Spec = Field(default_factory=lambda: desk_evaluation_spec(Dataset_Role.Validation))
    test: Dataset_Spec = Field(default_factory=lambda: desk_evaluation_spec(Dataset_Role.Test))

    def spec(self, role: Dataset_Role) -> Dataset_Spec:
        if role is Dataset_Role.Train:
            return self.train
        elif role is Dataset_Role.Validation:
            return self.validation
        return self.test


class Render_Section(BaseModel):
    """
        Duration and output formats of simulate
    """
    T_sim: float = Field(1.0, gt=0.0)
    mode: Render_Mode = Render_Mode.Float32
    window_length: int = Field(4096, ge=2)
    hop: int = Field(1024, ge=1)


class Run_Config(BaseModel):
    """
        Everything a configuration file can set. A string is given either scaled or physically, never both
    """
    string: Optional[Scaled_String_Params] = None
    physical_string: Optional[Physical_String_Section] = None
    excitation: Excitation_Params = Excitation_Params(famp=3e4, Te=1e-3, xe=0.25, xo=0.7)
    solver: Solver_Config = Field(default_factory=Solver_Config)
    training: Train_Config = Field(default_factory=Train_Config)
    dataset: Dataset_Section = Field(default_factory=Dataset_Section)
    render: Render_Section = Field(default_factory=Render_Section)

    @model_validator(mode="after")
    def _one_string(self):
        if self.string is not None and self.physical_string is not None:
            raise ValueError("Give either [string] or [physical_string], not both")
        return self

    def scaled_string(self) -> Optional[Scaled_String_Params]:
        """
        :return: the configured string in scaled form, None if no string is configured
        """
        if self.physical_string is not None:
            return scale_physical_params(self.physical_string, self.physical_string.M)
        return self.string

    def scaled_excitation(self) -> Excitation_Params:
        """
        :return: the excitation, with famp converted from newtons when the physical string gives one
        """
        if self.physical_string is not None and self.physical_string.famp_newton is not None:
            famp = scale_excitation_amplitude(self.physical_string.famp_newton, self.physical_string)
            return self.excitation.model_copy(update={"famp": famp})
        return self.excitation


def read_config(path: Union[str, Path, None]) -> Run_Config:
    """
    :param path: TOML file, the defaults when None
    :return: validated configuration
    """
    if path is None:
        return Run_Config()
    with open(path, "rb") as toml_file:
        try:
            data = tomllib.load(toml_file)
        except tomllib.TOMLDecodeError as e:
            raise Invalid_Parameter_Error(f"Malformed configuration {path}: {e}") from e
    try:
        return Run_Config.model_validate(data)
    except ValidationError as e:
        raise Invalid_Parameter_Error(f"Invalid configuration {path}:\n{e}") from e


def worker_count(override: Optional[int] = None) -> int:
    """
    :param override: explicit worker count
    :return: override, else MODAL_STRING_WORKERS from the environment or a .env file, else 1
    """
    if override is not None:
        return max(1, override)
    load_dotenv()
    value = os.getenv(WORKERS_VARIABLE, "1").strip()
    try:
        return max(1, int(value))
    except ValueError:
        raise Invalid_Parameter_Error(f"{WORKERS_VARIABLE} must be an integer but got {value!r}")
