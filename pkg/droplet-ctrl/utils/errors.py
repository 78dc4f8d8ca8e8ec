"""
Error handling utilities for droplet-ctrl.
Provides the exception hierarchy and machine-readable failure records.
"""
from typing import Optional, Dict, Any
import traceback


class DropletCtrlError(Exception):
    """Base exception for droplet-ctrl errors."""
    pass


class ConfigError(DropletCtrlError):
    """Raised when runtime or scenario configuration is invalid."""
    pass


class MeshError(DropletCtrlError):
    """Raised when a mesh cannot be built or violates its invariants."""
    pass


class AssemblyError(DropletCtrlError):
    """Raised on space/mesh mismatch, unknown boundary tags or bad kernels."""
    pass


class SolverError(DropletCtrlError):
    """Base class for nonlinear and linear solver failures."""
    pass


class NewtonDiverged(SolverError):
    """Raised when Newton's method does not reach the requested tolerance."""

    def __init__(self, message: str, iterations: int = 0, residual: float = float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class LinearSolveFailed(SolverError):
    """Raised when a sparse factorization or solve fails."""
    pass


class SimulationError(DropletCtrlError):
    """Raised when a time step fails; carries the failing step index."""

    def __init__(self, message: str, step: int, cause: Optional[Exception] = None):
        super().__init__(f"step {step}: {message}")
        self.step = step
        self.cause = cause


class ControlError(DropletCtrlError):
    """Raised on inconsistent control grids, boxes or control vectors."""
    pass


class OptimizationError(DropletCtrlError):
    """Raised when the optimizer fails; carries the iterate index."""

    def __init__(self, message: str, iteration: int, cause: Optional[Exception] = None):
        super().__init__(f"iterate {iteration}: {message}")
        self.iteration = iteration
        self.cause = cause


class EquilibriumNotReached(DropletCtrlError):
    """Raised when the desired-state pre-run does not settle within its step cap."""
    pass


class EnergyInequalityViolated(DropletCtrlError):
    """Raised when a trajectory violates the discrete energy inequality."""

    def __init__(self, message: str, steps: Optional[list] = None):
        super().__init__(message)
        self.steps = steps or []


class GradientCheckFailed(DropletCtrlError):
    """Raised when the reduced gradient disagrees with finite differences."""

    def __init__(self, message: str, summary: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.summary = summary or {}


EXIT_OK = 0
EXIT_SOLVER_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_ENERGY_VIOLATION = 3
EXIT_GRADIENT_CHECK = 4


def exit_code_for(error: Exception) -> int:
    """
    Map an exception to the process exit status.

    Args:
        error: Exception instance

    Returns:
        Exit code
    """
    if isinstance(error, ConfigError):
        return EXIT_CONFIG_ERROR
    if isinstance(error, EnergyInequalityViolated):
        return EXIT_ENERGY_VIOLATION
    if isinstance(error, GradientCheckFailed):
        return EXIT_GRADIENT_CHECK
    return EXIT_SOLVER_FAILURE


def _is_development() -> bool:
    from .config import get_config

    try:
        return get_config().is_development
    except ConfigError:
        return False


def create_error_response(
    error: Exception,
    include_traceback: Optional[bool] = None
) -> Dict[str, Any]:
    """
    Create standardized error record.

    Args:
        error: Exception instance
        include_traceback: Whether to include traceback (default: based on environment)

    Returns:
        Error record dictionary
    """
    if include_traceback is None:
        include_traceback = _is_development()

    response: Dict[str, Any] = {
        "detail": str(error),
        "error_type": type(error).__name__
    }

    step = getattr(error, "step", None)
    if step is not None:
        response["step"] = step
    iteration = getattr(error, "iteration", None)
    if iteration is not None:
        response["iteration"] = iteration

    if include_traceback:
        response["traceback"] = "".join(
            traceback.format_exception(type(error), error, error.__traceback__)
        )

    return response
