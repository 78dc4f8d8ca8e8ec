"""Scenario construction, desired field and subcommand runners."""
from .commands import COMMANDS, resolve_output_dir, run_subcommand
from .desired import analytic_target, equilibrate, make_desired_field
from .scenario import Scenario, build_scenario

__all__ = [
    "COMMANDS",
    "resolve_output_dir",
    "run_subcommand",
    "analytic_target",
    "equilibrate",
    "make_desired_field",
    "Scenario",
    "build_scenario",
]
