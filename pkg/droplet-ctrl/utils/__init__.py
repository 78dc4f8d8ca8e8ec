"""Utilities for droplet-ctrl."""
from .errors import (
    DropletCtrlError,
    ConfigError,
    MeshError,
    AssemblyError,
    SolverError,
    NewtonDiverged,
    LinearSolveFailed,
    SimulationError,
    ControlError,
    OptimizationError,
    EquilibriumNotReached,
    EnergyInequalityViolated,
    create_error_response,
    exit_code_for,
)
from .config import get_config, reset_config, Config
from .logging import setup_logging, get_logger, JSONFormatter

__all__ = [
    "get_config",
    "reset_config",
    "Config",
    "setup_logging",
    "get_logger",
    "JSONFormatter",
    "DropletCtrlError",
    "ConfigError",
    "MeshError",
    "AssemblyError",
    "SolverError",
    "NewtonDiverged",
    "LinearSolveFailed",
    "SimulationError",
    "ControlError",
    "OptimizationError",
    "EquilibriumNotReached",
    "EnergyInequalityViolated",
    "create_error_response",
    "exit_code_for",
]
