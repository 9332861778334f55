"""Settings of the SAV time-stepping scheme"""
from pydantic import BaseModel, ConfigDict, Field


class Solver_Config(BaseModel):
    """
        Sampling rate, gauge constant, control gain and the degenerate-velocity threshold of the control term
    """
    model_config = ConfigDict(frozen=True)

    fs: float = Field(32000.0, gt=0.0, description="sampling rate (Hz); the time step is k = 1/fs")
    eps: float = Field(1e-12, gt=0.0, description="gauge constant of the auxiliary variable")
    lambda0: float = Field(1.0, ge=0.0, description="gain of the drift control term")
    p_l1_tolerance: float = Field(1e-14, ge=0.0, description="below this L1 norm of p the control term is zero")

    @property
    def k(self) -> float:
        """
        :return: time step in seconds
        """
        return 1.0 / self.fs

    def with_sample_rate(self, fs: float):
        """
        :param fs: new sampling rate
        :return: copy of this configuration at the given rate
        """
        return self.model_copy(update={"fs": fs})
