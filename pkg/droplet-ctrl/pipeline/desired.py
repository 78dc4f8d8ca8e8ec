"""
Desired phase field phi_d.

Taken from a field file, from the cache of an earlier pre-run, or generated:
the analytic cap is relaxed on a flat wall under the constant control
Bu = cos(theta_target) - cos(theta_eq) until it stops moving.
"""
import math
from typing import Optional

import numpy as np

from artifacts.writers import read_field, write_field
from fem.space import Field
from models.scenario import ScenarioConfig
from physics.droplet import initial_droplet
from solver.forward import State, advance, initial_state
from solver.problem import DropletProblem
from utils.errors import EquilibriumNotReached, SimulationError, SolverError
from utils.logging import get_logger

logger = get_logger(__name__)


def analytic_target(config: ScenarioConfig, problem: DropletProblem) -> Field:
    target = config.target
    return initial_droplet(target.center, target.radius, config.physics.eps, problem.scalar)


def equilibrate(
    problem: DropletProblem,
    phi_seed: Field,
    theta_deg: float,
    tol: float,
    max_steps: int,
) -> State:
    """
    Relax a droplet on a flat wall at the static angle theta_deg.

    Args:
        problem: Problem context; its inclination is replaced by zero
        phi_seed: Starting phase field
        theta_deg: Static contact angle imposed through Bu
        tol: Stop when ||phi^m - phi^(m-1)||_L2 / tau <= tol
        max_steps: Step cap

    Returns:
        Equilibrium state

    Raises:
        EquilibriumNotReached: If the rate stays above tol for max_steps steps
        SimulationError: On a solver failure during the pre-run
    """
    flat = problem.with_params(problem.params.model_copy(update={"incline_deg": 0.0}))
    value = math.cos(math.radians(theta_deg)) - flat.params.cos_theta_eq
    bu_patch = np.full(flat.grid.S, value)
    state = initial_state(flat, phi_seed)
    rate = float("inf")
    for m in range(1, max_steps + 1):
        try:
            new = advance(flat, state, bu_patch, m)
        except SolverError as e:
            raise SimulationError(f"equilibrium pre-run: {e}", step=m, cause=e) from e
        diff = new.phi.coefficients - state.phi.coefficients
        rate = math.sqrt(max(float(diff @ (flat.M @ diff)), 0.0)) / flat.tau
        state = new
        logger.debug("Equilibrium step", extra={"extra_fields": {"step": m, "rate": rate}})
        if rate <= tol:
            logger.info(
                "Equilibrium reached",
                extra={"extra_fields": {"steps": m, "rate": rate, "theta_deg": theta_deg}},
            )
            return state
    raise EquilibriumNotReached(
        f"droplet not at rest after {max_steps} steps (rate {rate:.3e} > {tol:.1e})"
    )


def make_desired_field(config: ScenarioConfig, problem: DropletProblem) -> Field:
    """
    Desired phase field of the run.

    Args:
        config: Scenario config (target section)
        problem: Problem context; phi_d lives on problem.scalar

    Returns:
        phi_d
    """
    target = config.target
    if target.field_file is not None:
        logger.info("Desired field loaded", extra={"extra_fields": {"path": str(target.field_file)}})
        return read_field(target.field_file, problem.scalar)
    cache = target.cache_file
    if cache is not None and cache.is_file():
        logger.info("Desired field loaded from cache", extra={"extra_fields": {"path": str(cache)}})
        return read_field(cache, problem.scalar)

    seed = analytic_target(config, problem)
    if not target.equilibrate:
        return seed
    phi_d = equilibrate(problem, seed, target.theta_deg, target.equilibrium_tol, target.max_steps).phi
    if cache is not None:
        write_field(phi_d, cache)
        logger.info("Desired field cached", extra={"extra_fields": {"path": str(cache)}})
    return phi_d


def desired_source(config: ScenarioConfig) -> Optional[str]:
    """Where phi_d comes from, for run summaries."""
    if config.target.field_file is not None:
        return str(config.target.field_file)
    if config.target.cache_file is not None and config.target.cache_file.is_file():
        return str(config.target.cache_file)
    return "pre-run" if config.target.equilibrate else "analytic"
