"""
Tangent and adjoint sweeps of the discrete scheme, and the reduced gradient.

The adjoint is the exact transpose of the tangent: with the Lagrangian
L = J + sum_m p_CH^m . F_CH^m + p_NS^m . F_NS^m, step m of the backward sweep
first solves the Navier-Stokes adjoint (it only sees step m + 1), then the
Cahn-Hilliard adjoint. Multipliers of the Phi rows (the wetting equation)
are p_phi, those of the Psi rows are p_mu.
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from control.grid import ControlVector
from control.operators import apply_B_star, apply_BstarB, bu_all_steps
from fem.space import Field
from utils.logging import get_logger
from .forward import Trajectory
from .linearization import StepLinearization
from .problem import DropletProblem

logger = get_logger(__name__)


@dataclass
class TangentState:
    """Directional derivative of one time level (free velocity dofs only in y_ns)."""

    y_ch: np.ndarray  # (d_phi, d_mu)
    y_ns: np.ndarray  # (d_v free, d_p, d_multiplier)
    problem: DropletProblem

    @classmethod
    def zero(cls, problem: DropletProblem) -> "TangentState":
        n = problem.scalar.dof_count
        return cls(np.zeros(2 * n), np.zeros(problem.free.size + n + 1), problem)

    @property
    def n(self) -> int:
        return self.problem.scalar.dof_count

    @property
    def d_phi(self) -> Field:
        return Field(self.problem.scalar, self.y_ch[:self.n])

    @property
    def d_mu(self) -> Field:
        return Field(self.problem.scalar, self.y_ch[self.n:])

    @property
    def d_v(self) -> Field:
        return Field(self.problem.velocity, self.problem.extend_velocity(self.y_ns[:self.problem.free.size]))

    @property
    def d_p(self) -> Field:
        nf = self.problem.free.size
        return Field(self.problem.scalar, self.y_ns[nf:nf + self.n])

    @property
    def v_free(self) -> np.ndarray:
        return self.y_ns[:self.problem.free.size]


@dataclass
class AdjointState:
    """Multipliers of step m."""

    p_ch: np.ndarray  # (p_mu, p_phi): Psi-row and Phi-row multipliers
    p_ns: np.ndarray  # (p_v free, p_p, multiplier)
    m: int
    problem: DropletProblem
    sensitivity: Optional[np.ndarray] = None  # (S,) control sensitivity of step m

    @classmethod
    def zero(cls, problem: DropletProblem, m: int) -> "AdjointState":
        return cls(TangentState.zero(problem).y_ch, TangentState.zero(problem).y_ns, m, problem)

    @property
    def n(self) -> int:
        return self.problem.scalar.dof_count

    @property
    def p_mu(self) -> Field:
        return Field(self.problem.scalar, self.p_ch[:self.n])

    @property
    def p_phi(self) -> Field:
        return Field(self.problem.scalar, self.p_ch[self.n:])

    @property
    def p_v(self) -> Field:
        return Field(self.problem.velocity, self.problem.extend_velocity(self.p_ns[:self.problem.free.size]))

    @property
    def p_p(self) -> Field:
        nf = self.problem.free.size
        return Field(self.problem.scalar, self.p_ns[nf:nf + self.n])


def linearize(problem: DropletProblem, traj: Trajectory, m: int) -> StepLinearization:
    return StepLinearization(problem, traj.states[m - 1], traj.states[m], traj.bu[m - 1], m)


def tangent_step(
    lin: StepLinearization,
    d_prev: TangentState,
    dbu_patch: Optional[np.ndarray] = None,
) -> TangentState:
    """
    Solve the linearized step for (d_phi, d_mu), then for (d_v, d_p).

    Args:
        lin: Linearization of step m
        d_prev: Tangent of step m - 1
        dbu_patch: (S,) increment of B_m u (zero when None)

    Returns:
        Tangent of step m
    """
    rhs = lin.ch_dphi_prev @ d_prev.y_ch[:lin.n] + lin.ch_dv_prev @ d_prev.v_free
    if dbu_patch is not None:
        rhs = rhs + lin.control_action(dbu_patch)
    y_ch = lin.ch_lu.solve(-rhs)
    rhs_ns = lin.ns_dch @ y_ch + lin.ns_dphi_prev @ d_prev.y_ch[:lin.n] + lin.ns_dv_prev @ d_prev.v_free
    y_ns = lin.ns_lu.solve(-rhs_ns)
    return TangentState(y_ch, y_ns, lin.problem)


def tangent_solve(
    problem: DropletProblem,
    traj: Trajectory,
    du: Optional[ControlVector] = None,
    d0: Optional[TangentState] = None,
) -> List[TangentState]:
    """Tangents d^0..d^M for a control direction and/or an initial perturbation."""
    tangents = [d0 if d0 is not None else TangentState.zero(problem)]
    dbu = bu_all_steps(du, problem.tau, traj.n_steps) if du is not None else None
    for m in range(1, traj.n_steps + 1):
        lin = linearize(problem, traj, m)
        tangents.append(tangent_step(lin, tangents[-1], None if dbu is None else dbu[m - 1]))
    return tangents


def tracking_derivative(problem: DropletProblem, phi: Field, phi_d: Field) -> np.ndarray:
    """d/d phi of 1/2 tau int |phi - phi_d|^2."""
    return problem.tau * (problem.M @ (phi.coefficients - phi_d.coefficients))


def adjoint_step(
    lin: StepLinearization,
    lin_next: Optional[StepLinearization],
    adj_next: Optional[AdjointState],
    phi_d_m: Field,
) -> AdjointState:
    """
    Backward step m of the adjoint sweep.

    Args:
        lin: Linearization of step m
        lin_next: Linearization of step m + 1 (None for m = M)
        adj_next: Multipliers of step m + 1 (None for m = M)
        phi_d_m: Desired phase field of step m

    Returns:
        Multipliers of step m
    """
    n, nf = lin.n, lin.n_free
    rhs_ns = np.zeros(lin.n_ns)
    coupling_phi = np.zeros(n)
    if lin_next is not None and adj_next is not None:
        rhs_ns[:nf] = lin_next.ch_dv_prev.T @ adj_next.p_ch + lin_next.ns_dv_prev.T @ adj_next.p_ns
        coupling_phi = lin_next.ch_dphi_prev.T @ adj_next.p_ch + lin_next.ns_dphi_prev.T @ adj_next.p_ns
    p_ns = lin.ns_lu.solve(-rhs_ns, transpose=True)

    rhs_ch = lin.ns_dch.T @ p_ns
    rhs_ch[:n] += tracking_derivative(lin.problem, lin.state.phi, phi_d_m) + coupling_phi
    p_ch = lin.ch_lu.solve(-rhs_ch, transpose=True)
    return AdjointState(p_ch, p_ns, lin.m, lin.problem)


def adjoint_solve(
    problem: DropletProblem,
    traj: Trajectory,
    phi_d: Sequence[Field],
) -> Dict[int, AdjointState]:
    """
    Backward sweep m = M..1.

    Args:
        problem: Problem context
        traj: Forward trajectory
        phi_d: Desired fields phi_d^m for m = 1..M (index 0 is step 1)

    Returns:
        Multipliers keyed by step index, with the step sensitivities of the
        control attached as ``sensitivity`` arrays (S,)
    """
    adjoints: Dict[int, AdjointState] = {}
    lin_next: Optional[StepLinearization] = None
    adj_next: Optional[AdjointState] = None
    for m in range(traj.n_steps, 0, -1):
        lin = linearize(problem, traj, m)
        adj = adjoint_step(lin, lin_next, adj_next, phi_d[m - 1])
        adj.sensitivity = lin.control_sensitivity(adj.p_ch)
        adjoints[m] = adj
        lin_next, adj_next = lin, adj
        logger.debug("Adjoint step", extra={"extra_fields": {"step": m}})
    return adjoints


def reduced_gradient(
    problem: DropletProblem,
    u: ControlVector,
    adjoints: Dict[int, AdjointState],
    alpha: float,
) -> ControlVector:
    """
    g = alpha B*B u + B*(sigma_lg theta'(phi^(m-1)) p_phi^m per step).

    Args:
        problem: Problem context
        u: Control at which the trajectory was computed
        adjoints: Result of adjoint_solve
        alpha: Control cost weight

    Returns:
        Gradient in control coordinates
    """
    n_steps = max(adjoints) if adjoints else 0
    sens = np.zeros((n_steps, problem.grid.S))
    for m, adj in adjoints.items():
        sens[m - 1] = adj.sensitivity
    regularization = apply_BstarB(u) * alpha
    if n_steps == 0:
        return regularization
    return regularization + apply_B_star(problem.grid, sens / problem.tau, problem.tau)


def tangent_adjoint_identity(
    problem: DropletProblem,
    traj: Trajectory,
    phi_d: Sequence[Field],
    du: ControlVector,
    alpha: float,
) -> Dict[str, float]:
    """
    Both sides of sum_m <dJ/dphi^m, d_phi^m> = <g - alpha B*B u, du>.

    Returns:
        Dictionary with ``tangent``, ``adjoint`` and ``relative_error``
    """
    tangents = tangent_solve(problem, traj, du)
    lhs = sum(
        float(tracking_derivative(problem, traj.states[m].phi, phi_d[m - 1]) @ tangents[m].y_ch[:tangents[m].n])
        for m in range(1, traj.n_steps + 1)
    )
    adjoints = adjoint_solve(problem, traj, phi_d)
    g = reduced_gradient(problem, du, adjoints, 0.0)
    rhs = g.dot(du)
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return {"tangent": lhs, "adjoint": rhs, "relative_error": abs(lhs - rhs) / scale}
