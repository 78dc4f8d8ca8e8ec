"""
Reduced objective J(u) = 1/2 sum_m tau int |phi^m - phi_d^m|^2 + alpha/2 ||Bu||^2.
"""
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from control.grid import ControlVector
from control.operators import apply_BstarB, bu_norm_sq
from fem.space import Field
from solver.adjoint import adjoint_solve, reduced_gradient
from solver.forward import Trajectory, simulate
from solver.problem import DropletProblem
from utils.errors import ConfigError
from utils.logging import get_logger

logger = get_logger(__name__)

# A fixed field, a function of time, or piecewise constant samples (t_lo, t_hi, field)
DesiredState = Union[Field, Callable[[float], Field], Sequence[Tuple[float, float, Field]]]

_GAUSS_POINTS, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(3)


def desired_steps(problem: DropletProblem, phi_d: DesiredState) -> List[Field]:
    """
    Step averages phi_d^m = 1/tau int_(t_(m-1))^(t_m) phi_d(t) dt, m = 1..M.

    Piecewise constant samples are averaged exactly, functions of time with
    three-point Gauss quadrature per step.

    Raises:
        ConfigError: If piecewise samples leave part of a step uncovered
    """
    n_steps, tau = problem.n_steps, problem.tau
    if isinstance(phi_d, Field):
        return [phi_d] * n_steps
    space = problem.scalar
    out = []
    if callable(phi_d):
        for m in range(1, n_steps + 1):
            t0 = (m - 1) * tau
            times = t0 + 0.5 * tau * (_GAUSS_POINTS + 1.0)
            coefficients = sum(0.5 * w * phi_d(t).coefficients for t, w in zip(times, _GAUSS_WEIGHTS))
            out.append(Field(space, coefficients))
        return out

    samples = list(phi_d)
    for m in range(1, n_steps + 1):
        t0, t1 = (m - 1) * tau, m * tau
        coefficients = np.zeros(space.dof_count)
        covered = 0.0
        for lo, hi, field in samples:
            overlap = max(0.0, min(t1, hi) - max(t0, lo))
            coefficients += overlap * field.coefficients
            covered += overlap
        if abs(covered - tau) > 1e-9 * tau:
            raise ConfigError(f"desired-state samples cover {covered} of step {m} (length {tau})")
        out.append(Field(space, coefficients / tau))
    return out


@dataclass
class ObjectiveValue:
    J: float
    tracking: float
    regularization: float
    trajectory: Optional[Trajectory] = None


class ReducedObjective:
    """
    Control-to-cost map with its adjoint gradient.

    The last simulated trajectory is kept, so the gradient at an iterate just
    evaluated costs one backward sweep and no forward solve.
    """

    def __init__(
        self,
        problem: DropletProblem,
        phi0: Field,
        phi_d: DesiredState,
        alpha: float,
        v0: Optional[Field] = None,
        progress: bool = False,
    ):
        self.problem = problem
        self.phi0 = phi0
        self.v0 = v0
        self.alpha = float(alpha)
        self.desired = desired_steps(problem, phi_d)
        self.progress = progress
        self.forward_solves = 0
        self._last: Optional[Tuple[np.ndarray, ObjectiveValue]] = None

    def tracking(self, traj: Trajectory) -> float:
        M, tau = self.problem.M, self.problem.tau
        total = 0.0
        for m in range(1, traj.n_steps + 1):
            diff = traj.states[m].phi.coefficients - self.desired[m - 1].coefficients
            total += 0.5 * tau * float(diff @ (M @ diff))
        return total

    def evaluate(self, u: ControlVector) -> ObjectiveValue:
        if self._last is not None and np.array_equal(self._last[0], u.coefficients):
            return self._last[1]
        traj = simulate(self.problem, self.phi0, u, v0=self.v0, progress=self.progress)
        self.forward_solves += 1
        tracking = self.tracking(traj)
        regularization = 0.5 * self.alpha * bu_norm_sq(u)
        value = ObjectiveValue(tracking + regularization, tracking, regularization, traj)
        self._last = (u.coefficients.copy(), value)
        logger.debug(
            "Objective evaluated",
            extra={"extra_fields": {"J": value.J, "tracking": tracking, "regularization": regularization}},
        )
        return value

    def __call__(self, u: ControlVector) -> float:
        return self.evaluate(u).J

    def gradient(self, u: ControlVector) -> ControlVector:
        traj = self.evaluate(u).trajectory
        adjoints = adjoint_solve(self.problem, traj, self.desired)
        return reduced_gradient(self.problem, u, adjoints, self.alpha)


class QuadraticSurrogate:
    """J(u) = alpha/2 ||Bu||^2 with the forward model disabled."""

    def __init__(self, alpha: float):
        self.alpha = float(alpha)
        self.forward_solves = 0

    def evaluate(self, u: ControlVector) -> ObjectiveValue:
        regularization = 0.5 * self.alpha * bu_norm_sq(u)
        return ObjectiveValue(regularization, 0.0, regularization)

    def __call__(self, u: ControlVector) -> float:
        return self.evaluate(u).J

    def gradient(self, u: ControlVector) -> ControlVector:
        return apply_BstarB(u) * self.alpha


def reduced_objective(
    u: ControlVector,
    problem: DropletProblem,
    phi0: Field,
    phi_d: DesiredState,
    alpha: float,
) -> Tuple[ObjectiveValue, Trajectory]:
    """Simulate under u and evaluate both terms of J."""
    value = ReducedObjective(problem, phi0, phi_d, alpha).evaluate(u)
    return value, value.trajectory
