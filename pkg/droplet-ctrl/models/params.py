"""
Physical Parameter Models

Scalars of the two-phase model and the quantities derived from them.
"""
import math

from pydantic import BaseModel, ConfigDict, Field, model_validator

from default_config import DEFAULT_CONFIG

_PHYSICS = DEFAULT_CONFIG["physics"]

# Double-well scaling for W(phi) = (1 - phi^2)^2 / 4 with the tanh profile
C_W = 3.0 / (2.0 * math.sqrt(2.0))

# max |theta''| of the contact-line interpolation
THETA_SECOND_MAX = math.pi ** 2 / 8.0


class PhysicalParams(BaseModel):
    """
    Physical and numerical parameters of the droplet model.

    Defaults are the benchmark values. Derived quantities (sigma, S_gamma,
    rho_min) are exposed as properties.
    """

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        json_schema_extra={"example": dict(_PHYSICS)},
    )

    sigma_lg: float = Field(_PHYSICS["sigma_lg"], ge=0.0, description="Liquid-gas surface tension")
    rho_l: float = Field(_PHYSICS["rho_l"], gt=0.0, description="Liquid density (phase +1)")
    rho_g: float = Field(_PHYSICS["rho_g"], gt=0.0, description="Gas density (phase -1)")
    eta_l: float = Field(_PHYSICS["eta_l"], gt=0.0, description="Liquid viscosity")
    eta_g: float = Field(_PHYSICS["eta_g"], gt=0.0, description="Gas viscosity")
    g_mag: float = Field(_PHYSICS["g_mag"], ge=0.0, description="Gravity magnitude")
    incline_deg: float = Field(
        _PHYSICS["incline_deg"], ge=-90.0, le=90.0,
        description="Plate inclination in degrees; negative tilts gravity towards -x",
    )
    r: float = Field(_PHYSICS["r"], ge=0.0, description="Contact-line relaxation coefficient")
    eps: float = Field(_PHYSICS["eps"], gt=0.0, description="Interface width")
    b: float = Field(_PHYSICS["b"], gt=0.0, description="Constant mobility")
    theta_eq_deg: float = Field(
        _PHYSICS["theta_eq_deg"], gt=0.0, lt=180.0, description="Equilibrium contact angle in degrees"
    )
    tau: float = Field(_PHYSICS["tau"], gt=0.0, description="Time step")
    T_end: float = Field(_PHYSICS["T_end"], ge=0.0, description="Time horizon")
    alpha_reg: float = Field(_PHYSICS["alpha_reg"], ge=0.0, description="Control cost weight")

    @model_validator(mode="after")
    def _check_time_grid(self) -> "PhysicalParams":
        steps = round(self.T_end / self.tau)
        if abs(steps * self.tau - self.T_end) > 1e-9 * max(1.0, self.T_end):
            raise ValueError(
                f"T_end={self.T_end} is not an integer multiple of tau={self.tau}"
            )
        return self

    @property
    def sigma(self) -> float:
        """Scaled surface tension c_W * sigma_lg."""
        return C_W * self.sigma_lg

    @property
    def S_gamma(self) -> float:
        """Boundary stabilization, valid for every |cos(theta_eq) + Bu| <= 1."""
        return 0.5 * self.sigma_lg * THETA_SECOND_MAX

    @property
    def rho_min(self) -> float:
        return min(self.rho_l, self.rho_g)

    @property
    def cos_theta_eq(self) -> float:
        return math.cos(math.radians(self.theta_eq_deg))

    @property
    def n_steps(self) -> int:
        """Number of time steps M = T_end / tau."""
        return int(round(self.T_end / self.tau))
