"""
Cahn-Hilliard half step: Newton's method on the coupled (phi, mu) system.

The residual is the time-step-scaled weak form against P1 test functions
(Psi rows first, Phi rows second):

    F_Psi = M (phi - phi') - tau C(phi', v') + (tau^2/rho_min K_{phi'^2} + tau b K) mu
    F_Phi = tau sigma eps K phi + tau sigma/eps (N_+(phi) + N_-(phi'))
            + (r + tau S_gamma/2) M_b (phi - phi') - tau M mu + tau G(phi', Bu)

Only N_+(phi) is nonlinear in the unknowns.
"""
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp

from fem.space import Field
from models.reports import NewtonReport
from utils.errors import NewtonDiverged
from utils.logging import get_logger
from . import forms
from .linear import Factorization, solve
from .problem import DropletProblem

logger = get_logger(__name__)


class CahnHilliardSystem:
    """Lagged data of one Cahn-Hilliard step and its residual/Jacobian."""

    def __init__(self, problem: DropletProblem, phi_prev: Field, v_prev: Field, bu_patch: np.ndarray):
        self.problem = problem
        self.phi_prev = phi_prev
        self.v_prev = v_prev
        self.bu_patch = np.asarray(bu_patch, dtype=float)
        p, tau = problem.params, problem.tau
        self.n = problem.scalar.dof_count

        self.c_b = p.r + 0.5 * tau * p.S_gamma
        self.flux_matrix = (
            (tau ** 2 / p.rho_min) * forms.phase_weighted_stiffness(problem, phi_prev)
            + (tau * p.b) * problem.K
        ).tocsr()
        self.wetting = forms.wetting_coefficient(problem, self.bu_patch)
        self.lagged_psi = -problem.M @ phi_prev.coefficients - tau * forms.advection_vector(problem, phi_prev, v_prev)
        self.lagged_phi = (
            -(tau * p.sigma / p.eps) * (problem.M @ phi_prev.coefficients)
            - self.c_b * (problem.M_b @ phi_prev.coefficients)
            + tau * forms.wetting_vector(problem, phi_prev, self.wetting)
        )
        self.linear_phi = (tau * p.sigma * p.eps * problem.K + self.c_b * problem.M_b).tocsr()

    def split(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return x[:self.n], x[self.n:]

    def residual(self, x: np.ndarray) -> np.ndarray:
        problem, p, tau = self.problem, self.problem.params, self.problem.tau
        phi, mu = self.split(x)
        f_psi = problem.M @ phi + self.lagged_psi + self.flux_matrix @ mu
        nonlinear = forms.convex_force(problem, Field(problem.scalar, phi))
        f_phi = (
            self.linear_phi @ phi
            + (tau * p.sigma / p.eps) * nonlinear
            - tau * (problem.M @ mu)
            + self.lagged_phi
        )
        return np.concatenate([f_psi, f_phi])

    def jacobian(self, x: np.ndarray) -> sp.csr_matrix:
        problem, p, tau = self.problem, self.problem.params, self.problem.tau
        phi, _ = self.split(x)
        convex = forms.convex_mass(problem, Field(problem.scalar, phi))
        lower_left = self.linear_phi + (tau * p.sigma / p.eps) * convex
        return sp.bmat(
            [[problem.M, self.flux_matrix], [lower_left, -tau * problem.M]], format="csr"
        )


def initial_chemical_potential(problem: DropletProblem, phi: Field) -> Field:
    """L2 projection of sigma (-eps Laplace phi + W'(phi)/eps) onto P1."""
    p = problem.params
    convex = forms.convex_force(problem, phi)
    rhs = p.sigma * p.eps * (problem.K @ phi.coefficients) + (p.sigma / p.eps) * (
        convex - problem.M @ phi.coefficients
    )
    return Field(problem.scalar, solve(problem.M, rhs, what="mass matrix"))


def ch_step(
    problem: DropletProblem,
    phi_prev: Field,
    v_prev: Field,
    bu_patch: np.ndarray,
    mu_guess: Optional[Field] = None,
    step: Optional[int] = None,
) -> Tuple[Field, Field, NewtonReport]:
    """
    Solve the Cahn-Hilliard equations of one time step.

    Args:
        problem: Problem context
        phi_prev: Phase field of the previous step
        v_prev: Velocity of the previous step
        bu_patch: (S,) step average of the control per bottom patch
        mu_guess: Initial guess of mu (zero when None)
        step: Step index, used for logging only

    Returns:
        (phi, mu, newton report)

    Raises:
        NewtonDiverged: On non-finite residuals or no convergence within
            the iteration limit
        LinearSolveFailed: From the inner linear solves
    """
    cfg = problem.solver
    system = CahnHilliardSystem(problem, phi_prev, v_prev, bu_patch)
    mu0 = mu_guess.coefficients if mu_guess is not None else np.zeros(system.n)
    x = np.concatenate([phi_prev.coefficients, mu0])

    F = system.residual(x)
    norm = float(np.linalg.norm(F))
    tol = cfg.newton_rtol * norm + cfg.newton_atol
    report = NewtonReport(residuals=[norm])

    while not norm <= tol:
        if not np.isfinite(norm):
            raise NewtonDiverged("non-finite Cahn-Hilliard residual", report.iterations, norm)
        if report.iterations >= cfg.newton_max_iter:
            logger.error(
                "Newton did not converge",
                extra={"extra_fields": {"step": step, "iterations": report.iterations, "residual": norm}},
            )
            raise NewtonDiverged(
                f"Newton did not converge in {cfg.newton_max_iter} iterations (residual {norm:.3e})",
                report.iterations, norm,
            )

        dx = Factorization(system.jacobian(x), "Cahn-Hilliard Jacobian").solve(-F)
        scale = 1.0
        trial = x + dx
        F_trial = system.residual(trial)
        norm_trial = float(np.linalg.norm(F_trial))
        halvings = 0
        while not norm_trial < norm and halvings < cfg.max_halvings:
            scale *= 0.5
            halvings += 1
            trial = x + scale * dx
            F_trial = system.residual(trial)
            norm_trial = float(np.linalg.norm(F_trial))
        if halvings:
            report.damping_steps += halvings
            logger.warning(
                "Newton step damped",
                extra={"extra_fields": {"step": step, "halvings": halvings, "residual": norm_trial}},
            )

        x, F, norm = trial, F_trial, norm_trial
        report.iterations += 1
        report.residuals.append(norm)
        logger.debug(
            "Newton iterate",
            extra={"extra_fields": {"step": step, "iteration": report.iterations, "residual": norm}},
        )
        if np.isfinite(norm) and np.linalg.norm(scale * dx) <= 1e-14 * (1.0 + np.linalg.norm(x)):
            break

    report.converged = True
    phi, mu = system.split(x)
    return Field(problem.scalar, phi.copy()), Field(problem.scalar, mu.copy()), report
