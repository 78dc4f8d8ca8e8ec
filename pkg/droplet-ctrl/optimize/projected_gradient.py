"""
Projected gradient method with Armijo backtracking on the admissible box.

Iterates stay feasible and J decreases monotonically. The trial step of each
line search is the Barzilai-Borwein step of the last accepted pair when
enabled; rejected trials shrink it by a safeguarded quadratic interpolation
or by the fixed factor beta.
"""
from typing import Callable, Optional, Protocol

import numpy as np

from control.grid import AdmissibleBox, ControlVector
from control.operators import project_admissible
from fem.space import Field
from models.reports import IterationRecord, OptResult
from models.scenario import OptimizerConfig
from solver.problem import DropletProblem
from utils.errors import DropletCtrlError, OptimizationError
from utils.logging import get_logger
from .objective import DesiredState, ReducedObjective

logger = get_logger(__name__)

BB_STEP_MIN = 1e-10
BB_STEP_MAX = 1e10
INTERP_LO = 0.1
INTERP_HI = 0.5


class Objective(Protocol):
    forward_solves: int

    def evaluate(self, u: ControlVector): ...

    def gradient(self, u: ControlVector) -> ControlVector: ...


def stationarity(u: ControlVector, gradient: ControlVector, box: AdmissibleBox) -> float:
    """||u - P(u - g)||, zero exactly at KKT points."""
    return float(np.linalg.norm((u - project_admissible(u - gradient, box)).coefficients))


def _shrink(step: float, slope: float, J: float, J_trial: float, config: OptimizerConfig) -> float:
    """Next trial step after a rejected one."""
    if not config.interpolate:
        return config.beta * step
    # q(t) = J + t slope + t^2 curv along the projected arc, t in [0, 1]
    curv = J_trial - J - slope
    if curv <= 0.0:
        return config.beta * step
    t = -slope / (2.0 * curv)
    return float(np.clip(t, INTERP_LO, INTERP_HI)) * step


def _bb_step(du: ControlVector, dg: ControlVector, fallback: float) -> float:
    curvature = du.dot(dg)
    if curvature <= 0.0:
        return fallback
    return float(np.clip(du.dot(du) / curvature, BB_STEP_MIN, BB_STEP_MAX))


def minimize(
    objective: Objective,
    u0: ControlVector,
    box: AdmissibleBox,
    config: Optional[OptimizerConfig] = None,
    callback: Optional[Callable[[IterationRecord, ControlVector], None]] = None,
) -> OptResult:
    """
    Minimize the objective over the box.

    Args:
        objective: Provides evaluate(u) (with J, tracking, regularization) and gradient(u)
        u0: Starting control (projected onto the box first)
        box: Admissible set
        config: Optimizer settings
        callback: Called with each accepted iterate

    Returns:
        OptResult with the last accepted iterate and its gradient

    Raises:
        OptimizationError: A forward or adjoint solve failed; the iteration
            number and the underlying error are attached
    """
    config = config or OptimizerConfig()
    iteration = 0

    def _guard(fn, *args):
        try:
            return fn(*args)
        except DropletCtrlError as e:
            logger.error(
                "Solve failed during optimization",
                extra={"extra_fields": {"iteration": iteration, "error": str(e)}},
            )
            raise OptimizationError(f"iteration {iteration}: {e}", iteration=iteration, cause=e) from e

    u = project_admissible(u0, box)
    solves_before = objective.forward_solves
    value = _guard(objective.evaluate, u)
    g = _guard(objective.gradient, u)
    stat = stationarity(u, g, box)
    history = [IterationRecord(
        iter=0, J=value.J, tracking=value.tracking, regularization=value.regularization,
        stationarity=stat, step=0.0, forward_solves=objective.forward_solves - solves_before,
    )]
    logger.info("Optimizer started", extra={"extra_fields": history[0].model_dump()})
    if callback:
        callback(history[0], u)

    step = config.step0
    converged = False
    message = "maximum number of iterations reached"
    u_old: Optional[ControlVector] = None
    g_old: Optional[ControlVector] = None

    for iteration in range(1, config.max_iters + 1):
        if stat <= config.grad_tol:
            converged, message = True, "stationarity below tolerance"
            break
        if config.bb_step and u_old is not None:
            step = _bb_step(u - u_old, g - g_old, config.step0)

        solves_before = objective.forward_solves
        accepted = None
        vanished = False
        for _ in range(config.max_backtracks):
            trial = project_admissible(u - step * g, box)
            direction = trial - u
            slope = g.dot(direction)
            # step * g below the round-off of u
            if not np.any(direction.coefficients):
                vanished = True
                break
            trial_value = _guard(objective.evaluate, trial)
            if trial_value.J <= value.J + config.armijo_c * slope:
                accepted = (trial, trial_value)
                break
            logger.debug(
                "Step rejected",
                extra={"extra_fields": {"iteration": iteration, "step": step, "J_trial": trial_value.J}},
            )
            step = _shrink(step, slope, value.J, trial_value.J, config)

        if vanished:
            converged, message = True, "projected step vanished"
            break
        if accepted is None:
            message = "line search failed to decrease J"
            logger.warning(message, extra={"extra_fields": {"iteration": iteration, "step": step}})
            break

        u_old, g_old = u, g
        u, value = accepted
        g = _guard(objective.gradient, u)
        stat = stationarity(u, g, box)
        record = IterationRecord(
            iter=iteration, J=value.J, tracking=value.tracking, regularization=value.regularization,
            stationarity=stat, step=step, forward_solves=objective.forward_solves - solves_before,
        )
        history.append(record)
        logger.info("Optimizer iteration", extra={"extra_fields": record.model_dump()})
        if callback:
            callback(record, u)
    else:
        if stat <= config.grad_tol:
            converged, message = True, "stationarity below tolerance"

    logger.info(
        "Optimizer finished",
        extra={"extra_fields": {"converged": converged, "message": message, "J": value.J, "stationarity": stat}},
    )
    return OptResult(
        u_opt=u.coefficients.tolist(),
        J=value.J,
        history=history,
        converged=converged,
        message=message,
        gradient=g.coefficients.tolist(),
    )


def optimize(
    u0: ControlVector,
    config: OptimizerConfig,
    problem: DropletProblem,
    phi0: Field,
    phi_d: DesiredState,
    box: AdmissibleBox,
) -> OptResult:
    """Minimize the reduced objective of a droplet problem over the box."""
    alpha = config.alpha_reg if config.alpha_reg is not None else problem.params.alpha_reg
    return minimize(ReducedObjective(problem, phi0, phi_d, alpha), u0, box, config)
