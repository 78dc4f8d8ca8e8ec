"""
Discrete energy diagnostics.

Per step m the scheme satisfies

    E(v^m, phi^m) + tau int 2 eta |Dv^m|^2 + tau b |grad mu^m|^2
        + tau^2/(2 rho_min) int |phi^(m-1)|^2 |grad mu^m|^2 + tau r |B^m|^2_boundary
    <= E(v^(m-1), phi^(m-1)) + tau int rho^m g . v^m

with E = kinetic + Ginzburg-Landau bulk + wetting energy, the wetting energy
of both sides taken with the control of step m.
"""
from typing import List, Optional

import numpy as np

from fem.assembly import integrate, integrate_boundary
from fem.space import Field
from models.reports import EnergyReport, EnergyStep
from physics.material import double_well, eval_theta_family
from . import forms
from .forward import State, Trajectory
from .problem import DropletProblem


def kinetic_energy(problem: DropletProblem, phi: Field, v: Field) -> float:
    c = v.coefficients
    return 0.5 * float(c @ (forms.velocity_mass(problem, phi) @ c))


def bulk_energy(problem: DropletProblem, phi: Field) -> float:
    p = problem.params
    c = phi.coefficients
    well = integrate(problem.mesh, lambda coeffs, x: double_well(coeffs[0].value), [phi], degree=problem.degree)
    return p.sigma * (0.5 * p.eps * float(c @ (problem.K @ c)) + well / p.eps)


def wetting_energy(problem: DropletProblem, phi: Field, bu_patch: np.ndarray) -> float:
    """int gamma_u(phi) over the wetting boundary."""
    coefficient = forms.wetting_coefficient(problem, bu_patch)
    return integrate_boundary(
        problem.mesh,
        lambda coeffs, x: coefficient * eval_theta_family(coeffs[0].value).theta,
        coeff_fields=[phi],
        quadrature=problem.quadrature,
    )


def total_energy(problem: DropletProblem, state: State, bu_patch: np.ndarray) -> float:
    return (
        kinetic_energy(problem, state.phi, state.v)
        + bulk_energy(problem, state.phi)
        + wetting_energy(problem, state.phi, bu_patch)
    )


def _step_row(problem: DropletProblem, prev: State, state: State, bu_patch: np.ndarray, m: int,
              e_prev: Optional[float] = None) -> EnergyStep:
    p, tau = problem.params, problem.tau
    kinetic = kinetic_energy(problem, state.phi, state.v)
    bulk = bulk_energy(problem, state.phi)
    boundary = wetting_energy(problem, state.phi, bu_patch)
    energy = kinetic + bulk + boundary
    if e_prev is None:
        e_prev = total_energy(problem, prev, bu_patch)

    v, mu = state.v.coefficients, state.mu.coefficients
    jump = state.phi.coefficients - prev.phi.coefficients
    viscous = tau * float(v @ (forms.viscous_matrix(problem, state.phi) @ v))
    mobility = tau * p.b * float(mu @ (problem.K @ mu))
    stabilization = tau ** 2 / (2.0 * p.rho_min) * float(
        mu @ (forms.phase_weighted_stiffness(problem, prev.phi) @ mu)
    )
    relaxation = p.r / tau * float(jump @ (problem.M_b @ jump))
    gravity_work = tau * float(forms.gravity_load(problem, state.phi) @ v)

    lhs = energy + viscous + mobility + stabilization + relaxation
    rhs = e_prev + gravity_work
    newton = state.newton
    return EnergyStep(
        step=m,
        t=state.t,
        kinetic=kinetic,
        bulk=bulk,
        boundary=boundary,
        energy=energy,
        viscous=viscous,
        mobility=mobility,
        stabilization=stabilization,
        relaxation=relaxation,
        gravity_work=gravity_work,
        newton_iterations=newton.iterations if newton else 0,
        newton_residual=newton.final_residual if newton else 0.0,
        newton_damping=newton.damping_steps if newton else 0,
        contraction=newton.contraction_exponent if newton else None,
        slack=rhs - lhs,
    )


def energy_report(problem: DropletProblem, traj: Trajectory, rtol: Optional[float] = None) -> EnergyReport:
    """
    Evaluate both sides of the energy inequality at every step.

    Args:
        problem: Problem context of the trajectory
        traj: Forward trajectory
        rtol: Relative slack (problem.solver.energy_rtol when None)

    Returns:
        EnergyReport with one row per time level (row 0 holds E^0 only)
    """
    rtol = problem.solver.energy_rtol if rtol is None else rtol
    first_bu = traj.bu[0] if traj.n_steps else np.zeros(problem.grid.S)
    s0 = traj.states[0]
    kinetic0 = kinetic_energy(problem, s0.phi, s0.v)
    bulk0 = bulk_energy(problem, s0.phi)
    boundary0 = wetting_energy(problem, s0.phi, first_bu)
    rows: List[EnergyStep] = [
        EnergyStep(step=0, t=s0.t, kinetic=kinetic0, bulk=bulk0, boundary=boundary0,
                   energy=kinetic0 + bulk0 + boundary0)
    ]
    for m in range(1, traj.n_steps + 1):
        rows.append(_step_row(problem, traj.states[m - 1], traj.states[m], traj.bu[m - 1], m))

    scale = max([abs(r.energy) for r in rows] + [abs(r.energy + r.slack) for r in rows] + [1e-300])
    cumulative = 0.0
    for row in rows[1:]:
        cumulative += row.slack
        row.cumulative_slack = cumulative
        row.ok = row.slack >= -rtol * scale
        row.cumulative_ok = cumulative >= -rtol * scale
    return EnergyReport(rows=rows, rtol=rtol, scale=scale)


def check_energy_inequality(report: EnergyReport, cumulative: bool = False) -> List[bool]:
    """Per-step pass flags of the inequality (or of its summed form)."""
    if cumulative:
        return [row.cumulative_ok for row in report.rows[1:]]
    return [row.ok for row in report.rows[1:]]
