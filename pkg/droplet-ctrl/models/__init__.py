"""Pydantic models: physical parameters, scenario configuration and reports."""
from .params import PhysicalParams
from .scenario import (
    ControlConfig,
    OptimizerConfig,
    ScenarioConfig,
    dump_config,
    load_config,
    parse_config,
)
from .reports import EnergyReport, EnergyStep, IterationRecord, NewtonReport, OptResult, RunManifest

__all__ = [
    "PhysicalParams",
    "ControlConfig",
    "OptimizerConfig",
    "ScenarioConfig",
    "dump_config",
    "load_config",
    "parse_config",
    "EnergyReport",
    "EnergyStep",
    "IterationRecord",
    "NewtonReport",
    "OptResult",
    "RunManifest",
]
