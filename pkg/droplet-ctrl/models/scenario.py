"""
Scenario Configuration Models

One JSON file describes a complete run: mesh, physics, control grid,
initial and desired droplets, boundary conditions, solver and optimizer
settings, and output options.
"""
import json
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from default_config import DEFAULT_CONFIG
from utils.errors import ConfigError
from .params import PhysicalParams

VelocityCondition = Literal["no_slip", "free_slip"]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class MeshConfig(_Section):
    nx: int = Field(DEFAULT_CONFIG["mesh"]["nx"], ge=1, description="Cells in x")
    ny: int = Field(DEFAULT_CONFIG["mesh"]["ny"], ge=1, description="Cells in y")
    Lx: float = Field(DEFAULT_CONFIG["mesh"]["Lx"], gt=0.0, description="Domain width")
    Ly: float = Field(DEFAULT_CONFIG["mesh"]["Ly"], gt=0.0, description="Domain height")


class ControlConfig(_Section):
    R: int = Field(DEFAULT_CONFIG["control"]["R"], ge=1, description="Number of time intervals")
    S: int = Field(DEFAULT_CONFIG["control"]["S"], ge=1, description="Number of bottom patches")
    lo: float = Field(DEFAULT_CONFIG["control"]["lo"], ge=-1.0, description="Lower bound of cos(theta_eq) + Bu")
    hi: float = Field(DEFAULT_CONFIG["control"]["hi"], le=1.0, description="Upper bound of cos(theta_eq) + Bu")
    initial_value: float = Field(
        0.0, description="Constant control coefficient used by simulate and as optimizer start"
    )

    @model_validator(mode="after")
    def _check_bounds(self) -> "ControlConfig":
        if not self.lo < self.hi:
            raise ValueError(f"lo={self.lo} must be smaller than hi={self.hi}")
        return self


class DropletConfig(_Section):
    center: Tuple[float, float] = Field(
        tuple(DEFAULT_CONFIG["droplet"]["center"]), description="Droplet center m"
    )
    radius: float = Field(DEFAULT_CONFIG["droplet"]["radius"], gt=0.0, description="Droplet radius r0")


class TargetConfig(_Section):
    center: Tuple[float, float] = Field(
        tuple(DEFAULT_CONFIG["target"]["center"]), description="Center of the analytic seed cap"
    )
    radius: float = Field(DEFAULT_CONFIG["target"]["radius"], gt=0.0, description="Radius of the seed cap")
    theta_deg: float = Field(
        DEFAULT_CONFIG["target"]["theta_deg"], gt=0.0, lt=180.0,
        description="Static contact angle imposed during the equilibrium pre-run",
    )
    field_file: Optional[Path] = Field(
        None, description="Precomputed desired field (dof,value); must exist"
    )
    cache_file: Optional[Path] = Field(
        None, description="Where the equilibrated desired field is cached; created when missing"
    )
    equilibrate: bool = Field(True, description="Run the pre-run; False uses the analytic seed directly")
    equilibrium_tol: float = Field(1e-6, gt=0.0, description="Stop when |phi^m - phi^(m-1)| / tau is below")
    max_steps: int = Field(2000, ge=1, description="Step cap of the pre-run")


class BoundaryConfig(_Section):
    left: VelocityCondition = DEFAULT_CONFIG["boundary"]["left"]
    right: VelocityCondition = DEFAULT_CONFIG["boundary"]["right"]
    bottom: VelocityCondition = DEFAULT_CONFIG["boundary"]["bottom"]
    top: VelocityCondition = DEFAULT_CONFIG["boundary"]["top"]


class SolverConfig(_Section):
    newton_rtol: float = Field(DEFAULT_CONFIG["solver"]["newton_rtol"], gt=0.0)
    newton_atol: float = Field(DEFAULT_CONFIG["solver"]["newton_atol"], gt=0.0)
    newton_max_iter: int = Field(DEFAULT_CONFIG["solver"]["newton_max_iter"], ge=1)
    max_halvings: int = Field(DEFAULT_CONFIG["solver"]["max_halvings"], ge=0)
    degree: int = Field(6, ge=1, le=6, description="Triangle quadrature degree of all volume terms")
    boundary_points: int = Field(3, ge=1, description="Gauss points per boundary segment")
    energy_rtol: float = Field(1e-8, gt=0.0, description="Relative slack of the energy inequality check")


class OptimizerConfig(_Section):
    max_iters: int = Field(DEFAULT_CONFIG["optimizer"]["max_iters"], ge=0)
    step0: float = Field(DEFAULT_CONFIG["optimizer"]["step0"], gt=0.0, description="Initial step length")
    beta: float = Field(DEFAULT_CONFIG["optimizer"]["beta"], gt=0.0, lt=1.0, description="Backtracking factor")
    armijo_c: float = Field(DEFAULT_CONFIG["optimizer"]["armijo_c"], gt=0.0, lt=1.0, description="Armijo constant")
    grad_tol: float = Field(DEFAULT_CONFIG["optimizer"]["grad_tol"], gt=0.0, description="Stationarity tolerance")
    max_backtracks: int = Field(20, ge=1)
    bb_step: bool = Field(True, description="Barzilai-Borwein initial step for the line search")
    interpolate: bool = Field(True, description="Quadratic interpolation when backtracking")
    alpha_reg: Optional[float] = Field(None, ge=0.0, description="Overrides physics.alpha_reg when set")


class OutputConfig(_Section):
    directory: Optional[Path] = Field(None, description="Output directory; --out and DROPLET_RESULTS_DIR otherwise")
    isoline_times: Optional[List[float]] = Field(
        None, description="Isoline sample times; integer times 0..T_end by default"
    )
    dump_fields: bool = Field(False, description="Write field and mesh files")


class GradcheckConfig(_Section):
    epsilons: List[float] = Field(default_factory=lambda: [1e-2, 1e-3, 1e-4, 1e-5, 1e-6])
    n_directions: int = Field(3, ge=1)
    seed: int = 0
    surrogate: bool = Field(False, description="Check the quadratic regularization only (no forward solves)")
    rel_tol: float = Field(1e-3, gt=0.0, description="Fail when the best relative error of a direction exceeds this")

    @model_validator(mode="after")
    def _check_epsilons(self) -> "GradcheckConfig":
        if not self.epsilons or any(e <= 0.0 for e in self.epsilons):
            raise ValueError("epsilons must be a non-empty list of positive numbers")
        return self


class ScenarioConfig(BaseModel):
    """
    Complete run description.

    Omitted sections and keys take the benchmark defaults.
    """

    model_config = ConfigDict(extra="forbid")

    mesh: MeshConfig = Field(default_factory=MeshConfig)
    physics: PhysicalParams = Field(default_factory=PhysicalParams)
    control: ControlConfig = Field(default_factory=ControlConfig)
    droplet: DropletConfig = Field(default_factory=DropletConfig)
    target: TargetConfig = Field(default_factory=TargetConfig)
    boundary: BoundaryConfig = Field(default_factory=BoundaryConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    gradcheck: GradcheckConfig = Field(default_factory=GradcheckConfig)

    @property
    def alpha_reg(self) -> float:
        if self.optimizer.alpha_reg is not None:
            return self.optimizer.alpha_reg
        return self.physics.alpha_reg


def _format_validation_error(error: ValidationError) -> str:
    lines = []
    for item in error.errors():
        key = ".".join(str(part) for part in item["loc"]) or "<root>"
        lines.append(f"{key}: {item['msg']}")
    return "; ".join(lines)


def _resolve(path: Optional[Path], base: Path) -> Optional[Path]:
    if path is None:
        return None
    path = Path(path).expanduser()
    return path if path.is_absolute() else (base / path).resolve()


def parse_config(data: dict, base_dir: Union[str, Path] = ".") -> ScenarioConfig:
    """
    Validate a config dictionary and resolve its file references.

    Args:
        data: Parsed JSON object
        base_dir: Directory relative paths are resolved against

    Returns:
        Validated ScenarioConfig

    Raises:
        ConfigError: Listing every violated constraint by dotted key, or a
            missing referenced file
    """
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    try:
        config = ScenarioConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid config: {_format_validation_error(e)}") from e

    base = Path(base_dir).resolve()
    target = config.target.model_copy(update={
        "field_file": _resolve(config.target.field_file, base),
        "cache_file": _resolve(config.target.cache_file, base),
    })
    output = config.output.model_copy(update={"directory": _resolve(config.output.directory, base)})
    config = config.model_copy(update={"target": target, "output": output})

    if config.target.field_file is not None and not config.target.field_file.is_file():
        raise ConfigError(f"target.field_file: file not found: {config.target.field_file}")
    return config


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    """
    Load and validate a scenario JSON file.

    Args:
        path: Config file

    Returns:
        ScenarioConfig with defaults filled in and paths resolved

    Raises:
        ConfigError: On unreadable files, JSON syntax errors (with line and
            column) and validation failures
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from e
    return parse_config(data, path.parent)


def dump_config(config: ScenarioConfig, path: Union[str, Path]) -> Path:
    """Write the resolved config as JSON; loading it again gives an equal model."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(config.model_dump_json(indent=2))
    return path
