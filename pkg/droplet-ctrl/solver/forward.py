"""
Forward time stepping: Cahn-Hilliard first, then Navier-Stokes, per step.
"""
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
from tqdm import tqdm

from control.grid import ControlVector
from control.operators import bu_all_steps, bu_for_step
from fem.assembly import integrate
from fem.space import Field
from models.reports import NewtonReport
from utils.config import get_config
from utils.errors import ControlError, SimulationError, SolverError
from utils.logging import get_logger
from .cahn_hilliard import ch_step, initial_chemical_potential
from .navier_stokes import ns_step
from .problem import DropletProblem

logger = get_logger(__name__)


@dataclass
class State:
    """Discrete fields of one time level."""

    v: Field
    p: Field
    phi: Field
    mu: Field
    t: float
    newton: Optional[NewtonReport] = None


@dataclass
class Trajectory:
    """States m = 0..M and the control averages B_m u used per step."""

    states: List[State]
    bu: np.ndarray
    control: Optional[ControlVector] = None
    newton_reports: List[NewtonReport] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.states)

    def __getitem__(self, m: int) -> State:
        return self.states[m]

    @property
    def n_steps(self) -> int:
        return len(self.states) - 1

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def final(self) -> State:
        return self.states[-1]


def mass(phi: Field) -> float:
    """int phi dx."""
    return integrate(phi.space.mesh, lambda coeffs, x: coeffs[0].value, [phi], degree=2)


def initial_state(problem: DropletProblem, phi0: Field, v0: Optional[Field] = None) -> State:
    """State at t = 0; mu^0 is the projected chemical potential of phi0."""
    v0 = v0 if v0 is not None else problem.zero_velocity()
    return State(
        v=v0,
        p=problem.zero_scalar(),
        phi=phi0,
        mu=initial_chemical_potential(problem, phi0),
        t=0.0,
    )


def advance(problem: DropletProblem, prev: State, bu_patch: np.ndarray, m: int) -> State:
    """
    One step of the decoupled scheme with given per-patch control values.

    The Navier-Stokes solve uses the new (phi, mu) and never feeds back into
    the Cahn-Hilliard solve of the same step.
    """
    phi, mu, report = ch_step(problem, prev.phi, prev.v, bu_patch, mu_guess=prev.mu, step=m)
    v, p = ns_step(problem, phi, prev.phi, mu, prev.v)
    logger.debug(
        "Step done",
        extra={"extra_fields": {
            "step": m,
            "newton_iterations": report.iterations,
            "newton_residual": report.final_residual,
        }},
    )
    return State(v=v, p=p, phi=phi, mu=mu, t=m * problem.tau, newton=report)


def step(problem: DropletProblem, prev: State, u: ControlVector, m: int) -> State:
    """
    Advance from step m - 1 to step m under control u.

    Raises:
        ControlError: If m is out of range
        SolverError: From the Newton or linear solves
    """
    if m < 1 or m > problem.n_steps:
        raise ControlError(f"step index {m} outside 1..{problem.n_steps}")
    return advance(problem, prev, bu_for_step(u, m, problem.tau), m)


def simulate(
    problem: DropletProblem,
    phi0: Field,
    u: ControlVector,
    v0: Optional[Field] = None,
    progress: Optional[bool] = None,
    on_step: Optional[Callable[[int, State], None]] = None,
) -> Trajectory:
    """
    Run the scheme for m = 1..M.

    Args:
        problem: Problem context (M = T_end / tau steps)
        phi0: Initial phase field
        u: Control vector
        v0: Initial velocity (zero when None)
        progress: Show a progress bar (DROPLET_PROGRESS when None)
        on_step: Called with (m, state) after every step

    Returns:
        Trajectory of M + 1 states

    Raises:
        SimulationError: Carrying the failing step index
    """
    n_steps = problem.n_steps
    if progress is None:
        progress = get_config().SHOW_PROGRESS
    bu = bu_all_steps(u, problem.tau, n_steps) if n_steps else np.zeros((0, problem.grid.S))

    states = [initial_state(problem, phi0, v0)]
    reports: List[NewtonReport] = []
    for m in tqdm(range(1, n_steps + 1), desc="time steps", disable=not progress, leave=False):
        try:
            state = advance(problem, states[-1], bu[m - 1], m)
        except SolverError as e:
            logger.error(
                "Simulation failed",
                extra={"extra_fields": {"step": m, "error": str(e), "error_type": type(e).__name__}},
            )
            raise SimulationError(str(e), step=m, cause=e) from e
        states.append(state)
        reports.append(state.newton)
        if on_step is not None:
            on_step(m, state)

    logger.debug(
        "Simulation done",
        extra={"extra_fields": {
            "steps": n_steps,
            "newton_iterations": sum(r.iterations for r in reports),
        }},
    )
    return Trajectory(states=states, bu=bu, control=u, newton_reports=reports)
