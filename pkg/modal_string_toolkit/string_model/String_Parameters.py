"""Parameter records for the simply supported stiff string and its plucking excitation"""
import math

from pydantic import BaseModel, ConfigDict, Field

from ..errors import Invalid_Parameter_Error


class Physical_String_Params(BaseModel):
    """
        Physical description of a string in SI units. Checked when scaled, see scale_physical_params
    """
    model_config = ConfigDict(frozen=True)

    L: float = Field(description="length (m)")
    rho: float = Field(description="material density (kg m^-3)")
    r: float = Field(description="radius (m)")
    T0: float = Field(description="tension (N)")
    E: float = Field(description="Young's modulus (N m^-2)")
    sigma0: float = Field(0.0, description="frequency-independent loss (s^-1)")
    sigma1: float = Field(0.0, description="frequency-dependent loss (m^2 s^-1)")

    @property
    def area(self) -> float:
        """
        :return: cross-sectional area pi r^2
        """
        return math.pi * self.r ** 2

    @property
    def moment_of_inertia(self) -> float:
        """
        :return: area moment of inertia pi r^4 / 4
        """
        return 0.25 * math.pi * self.r ** 4


class Scaled_String_Params(BaseModel):
    """
        The five parameter scaled string together with the modal truncation order
    """
    model_config = ConfigDict(frozen=True)

    gamma: float = Field(gt=0.0, description="scaled wave speed (s^-1)")
    kappa: float = Field(0.0, ge=0.0, description="scaled stiffness (s^-1)")
    nu: float = Field(ge=0.0, description="nonlinearity strength (s^-1)")
    sigma0: float = Field(0.0, ge=0.0, description="frequency-independent loss (s^-1)")
    sigma1_hat: float = Field(0.0, ge=0.0, description="scaled frequency-dependent loss (s^-1)")
    M: int = Field(ge=1, description="number of modes")

    def with_modes(self, M: int):
        """
        :param M: new mode count
        :return: copy of these parameters truncated to M modes
        """
        return self.model_copy(update={"M": M})


class Excitation_Params(BaseModel):
    """
        Raised-cosine pluck applied at x_e, observed at x_o (both normalised to the string length)
    """
    model_config = ConfigDict(frozen=True)

    famp: float = Field(ge=0.0, description="amplitude in scaled force units")
    Te: float = Field(gt=0.0, description="duration (s)")
    xe: float = Field(gt=0.0, lt=1.0, description="excitation position")
    xo: float = Field(gt=0.0, lt=1.0, description="output position")


def scale_physical_params(p: Physical_String_Params, M: int) -> Scaled_String_Params:
    """
    Reduce the physical parameter set to the scaled five-parameter string
    :param p: physical string parameters
    :param M: number of modes kept in the truncation
    :return: scaled parameters gamma, kappa, nu, sigma0, sigma1_hat
    """
    for name in ("L", "rho", "r", "T0", "E"):
        value = getattr(p, name)
        if not value > 0.0:
            raise Invalid_Parameter_Error(f"{name} must be strictly positive but got {value}")
    for name in ("sigma0", "sigma1"):
        value = getattr(p, name)
        if value < 0.0:
            raise Invalid_Parameter_Error(f"{name} must be non-negative but got {value}")
    rho_A = p.rho * p.area
    EA = p.E * p.area
    if EA < p.T0:
        raise Invalid_Parameter_Error(f"E*A = {EA} is below the tension T0 = {p.T0}; nu would be imaginary")
    gamma = math.sqrt(p.T0 / rho_A) / p.L
    kappa = math.sqrt(p.E * p.moment_of_inertia / rho_A) / p.L ** 2
    alpha_squared = EA / p.T0
    nu = gamma * math.sqrt((alpha_squared - 1.0) / 2.0)
    return Scaled_String_Params(gamma=gamma, kappa=kappa, nu=nu, sigma0=p.sigma0, sigma1_hat=p.sigma1 / p.L ** 2, M=M)


def scale_excitation_amplitude(famp: float, p: Physical_String_Params) -> float:
    """
    :param famp: excitation amplitude in newtons
    :param p: physical string the force is applied to
    :return: amplitude in the scaled force units used by the modal equations
    """
    return famp / (p.rho * p.area * p.L ** 2)


def fundamental_frequency(s: Scaled_String_Params) -> float:
    """
    :param s: scaled string
    :return: fundamental frequency gamma/2 in Hz, ignoring stiffness
    """
    return s.gamma / 2.0
