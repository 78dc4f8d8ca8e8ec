"""
Derivative blocks of one time step.

Step m has residuals F_CH (Psi rows, Phi rows) and F_NS (free velocity rows,
pressure rows, mean row) in the unknowns y_CH = (phi, mu) and
y_NS = (v_free, p, multiplier). Besides its own Jacobians the step depends
on phi^(m-1), v^(m-1) and the step control average B_m u; the blocks below
hold all of these derivatives at a forward solution.
"""
from typing import Optional

import numpy as np
import scipy.sparse as sp

from control.operators import patch_integrals
from fem.assembly import integrate_boundary_segments
from fem.space import Field
from physics.material import eval_theta_family
from . import forms
from .cahn_hilliard import CahnHilliardSystem
from .forward import State
from .linear import Factorization
from .navier_stokes import NavierStokesSystem
from .problem import DropletProblem


class StepLinearization:
    """
    Jacobians of step m at (prev, state).

    Attributes:
        ch_jacobian: d F_CH / d(phi, mu)                       (2n x 2n)
        ns_matrix: d F_NS / d(v_free, p, multiplier)           (k x k)
        ns_dch: d F_NS / d(phi, mu)                            (k x 2n)
        ch_dphi_prev: d F_CH / d phi^(m-1)                     (2n x n)
        ch_dv_prev: d F_CH / d v^(m-1), free columns           (2n x nf)
        ns_dphi_prev: d F_NS / d phi^(m-1)                     (k x n)
        ns_dv_prev: d F_NS / d v^(m-1), free columns           (k x nf)
    """

    def __init__(self, problem: DropletProblem, prev: State, state: State, bu_patch: np.ndarray, m: int):
        self.problem = problem
        self.prev = prev
        self.state = state
        self.m = m
        self.bu_patch = np.asarray(bu_patch, dtype=float)
        p, tau = problem.params, problem.tau
        n = problem.scalar.dof_count
        free = problem.free
        self.n = n
        self.n_free = free.size

        ch = CahnHilliardSystem(problem, prev.phi, prev.v, self.bu_patch)
        self.ch_jacobian = ch.jacobian(np.concatenate([state.phi.coefficients, state.mu.coefficients]))

        ns = NavierStokesSystem(problem, state.phi, prev.phi, state.mu, prev.v)
        self.ns_system = ns
        self.ns_matrix = ns.matrix()
        self.n_ns = ns.size
        pad = sp.csr_matrix((n + 1, n))

        dphi = sp.csr_matrix(forms.ns_dphi(problem, state.phi, state.mu, state.v))[free, :]
        dmu = sp.csr_matrix(forms.ns_dmu(problem, state.phi, prev.phi, state.v))[free, :]
        self.ns_dch = sp.bmat([[dphi, dmu], [pad, sp.csr_matrix((n + 1, n))]], format="csr")

        flux = forms.ch_flux_dphi_prev(problem, prev.phi, state.mu, prev.v)
        wetting = forms.wetting_second_mass(problem, prev.phi, ch.wetting)
        self.ch_dphi_prev = sp.vstack([
            -problem.M + flux,
            -(tau * p.sigma / p.eps) * problem.M - ch.c_b * problem.M_b + tau * wetting,
        ], format="csr")

        dv = sp.csc_matrix(forms.ch_flux_dv_prev(problem, prev.phi))[:, free]
        self.ch_dv_prev = sp.vstack([dv, sp.csr_matrix((n, free.size))], format="csr")

        ns_dphi_prev = sp.csr_matrix(forms.ns_dphi_prev(problem, prev.phi, state.mu, state.v, prev.v))[free, :]
        self.ns_dphi_prev = sp.vstack([ns_dphi_prev, pad], format="csr")

        ns_dv_prev = problem.restrict(forms.ns_dv_prev(problem, prev.phi, state.v), rows=True, cols=True)
        self.ns_dv_prev = sp.vstack([ns_dv_prev, sp.csr_matrix((n + 1, free.size))], format="csr")

        self._ch_lu: Optional[Factorization] = None
        self._ns_lu: Optional[Factorization] = None

    @property
    def ch_lu(self) -> Factorization:
        if self._ch_lu is None:
            self._ch_lu = Factorization(self.ch_jacobian, f"Cahn-Hilliard Jacobian of step {self.m}")
        return self._ch_lu

    @property
    def ns_lu(self) -> Factorization:
        if self._ns_lu is None:
            self._ns_lu = Factorization(self.ns_matrix, f"Navier-Stokes system of step {self.m}")
        return self._ns_lu

    def control_action(self, dbu_patch: np.ndarray) -> np.ndarray:
        """d F_CH / d(B_m u) applied to per-patch control increments."""
        problem = self.problem
        coefficient = problem.params.sigma_lg * problem.bu_at_quadrature(dbu_patch)
        phi_rows = problem.tau * forms.wetting_vector(problem, self.prev.phi, coefficient)
        return np.concatenate([np.zeros(self.n), phi_rows])

    def control_sensitivity(self, p_ch: np.ndarray) -> np.ndarray:
        """
        (d F_CH / d(B_m u))^T p_CH per patch:
        tau int_(patch s) sigma_lg theta'(phi^(m-1)) p_Phi ds.
        """
        problem = self.problem
        p_phi = Field(problem.scalar, p_ch[self.n:])
        sigma_lg = problem.params.sigma_lg
        values, bq = integrate_boundary_segments(
            problem.mesh,
            lambda coeffs, x: sigma_lg * eval_theta_family(coeffs[0].value).theta_p * coeffs[1].value,
            coeff_fields=[self.prev.phi, p_phi],
            quadrature=problem.quadrature,
        )
        values = np.where(problem.on_bottom, values, 0.0)
        return problem.tau * patch_integrals(problem.grid, values, bq.midpoints)
