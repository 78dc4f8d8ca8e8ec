"""
Navier-Stokes half step: one linear Taylor-Hood saddle-point solve.

Unknowns are ordered [free velocity dofs, pressure, mean multiplier]:

    [ A      -tau D^T   0 ] [v]   [rho(phi') v' - tau Cap(phi') mu + tau g rho(phi)]
    [ -tau D    0       m ] [p] = [0]
    [ 0        m^T      0 ] [l]   [0]

with A = M_{(rho(phi) + rho(phi'))/2} + tau a(rho(phi') v' + J, ., .) + tau Visc_{eta(phi)}.
"""
from typing import Tuple

import numpy as np
import scipy.sparse as sp

from fem.space import Field
from . import forms
from .linear import Factorization
from .problem import DropletProblem


class NavierStokesSystem:
    """Assembled momentum/continuity system of one time step."""

    def __init__(self, problem: DropletProblem, phi: Field, phi_prev: Field, mu: Field, v_prev: Field):
        self.problem = problem
        tau = problem.tau
        self.momentum = (
            forms.density_mass(problem, phi, phi_prev)
            + tau * forms.transport_matrix(problem, phi, phi_prev, mu, v_prev)
            + tau * forms.viscous_matrix(problem, phi)
        ).tocsr()
        self.load = (
            forms.velocity_mass(problem, phi_prev) @ v_prev.coefficients
            - tau * (forms.capillary_matrix(problem, phi_prev) @ mu.coefficients)
            + tau * forms.gravity_load(problem, phi)
        )
        self.n_free = problem.free.size
        self.n_p = problem.scalar.dof_count

    @property
    def size(self) -> int:
        return self.n_free + self.n_p + 1

    def matrix(self) -> sp.csr_matrix:
        problem, tau = self.problem, self.problem.tau
        A = problem.restrict(self.momentum, rows=True, cols=True)
        Df = sp.csr_matrix(problem.D)[:, problem.free]
        m = sp.csr_matrix(problem.ones_integral.reshape(-1, 1))
        return sp.bmat(
            [
                [A, -tau * Df.T, None],
                [-tau * Df, None, m],
                [None, m.T, None],
            ],
            format="csr",
        )

    def rhs(self) -> np.ndarray:
        return np.concatenate([self.load[self.problem.free], np.zeros(self.n_p + 1)])

    def split(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
        """Full velocity vector, pressure and multiplier of a solution vector."""
        v = self.problem.extend_velocity(x[:self.n_free])
        return v, x[self.n_free:self.n_free + self.n_p], float(x[-1])


def ns_step(
    problem: DropletProblem,
    phi: Field,
    phi_prev: Field,
    mu: Field,
    v_prev: Field,
) -> Tuple[Field, Field]:
    """
    Solve the momentum and continuity equations of one time step.

    Args:
        problem: Problem context
        phi, mu: Phase field and chemical potential of this step
        phi_prev, v_prev: Phase field and velocity of the previous step

    Returns:
        (v, p): velocity with the wall conditions imposed and mean-free pressure

    Raises:
        LinearSolveFailed: If the saddle-point system is singular
    """
    system = NavierStokesSystem(problem, phi, phi_prev, mu, v_prev)
    x = Factorization(system.matrix(), "Navier-Stokes system").solve(system.rhs())
    v, p, _ = system.split(x)
    return Field(problem.velocity, v), Field(problem.scalar, p)
