"""
Weak forms of the time-discrete droplet model and their derivatives.

All volume terms are integrated with the problem's quadrature degree and all
wetting terms with the problem's boundary quadrature, so residuals,
Jacobians, energies and adjoints see the same discrete integrals.
Trailing-prime names (phi_prev, v_prev) denote values of the previous step.
"""
import numpy as np
import scipy.sparse as sp

from fem.assembly import (
    assemble_boundary_form,
    assemble_boundary_vector,
    assemble_form,
    assemble_trilinear_a,
    assemble_vector,
    mass_kernel,
    stiffness_kernel,
)
from fem.space import Field
from physics.material import (
    double_well_convex_prime,
    double_well_convex_second,
    eval_eta,
    eval_eta_prime,
    eval_rho,
    eval_rho_prime,
    eval_rho_second,
    eval_theta_family,
)
from .problem import DropletProblem


def _sym(grad: np.ndarray) -> np.ndarray:
    return 0.5 * (grad + np.swapaxes(grad, -1, -2))


def _transport_derivative(U: np.ndarray, v_value: np.ndarray, v_grad: np.ndarray, test) -> np.ndarray:
    """a(U_j, v, psi_i) for trial-dependent transport U (t, Q, j, 2)."""
    conv = np.einsum("tqjd,tqcd->tqjc", U, v_grad)
    first = np.einsum("tqjc,tqic->tqij", conv, test.value)
    second = np.einsum("tqjd,tqicd,tqc->tqij", U, test.grad, v_value)
    return 0.5 * (first - second)


# ---------------------------------------------------------------------------
# Cahn-Hilliard terms


def advection_vector(problem: DropletProblem, phi_prev: Field, v_prev: Field) -> np.ndarray:
    """int phi' v' . grad Psi_i."""

    def kernel(v, coeffs, x):
        flux = coeffs[0].value[..., None] * coeffs[1].value
        return np.einsum("tqid,tqd->tqi", v.grad, flux)

    return assemble_vector(problem.scalar, kernel, [phi_prev, v_prev], degree=problem.degree)


def phase_weighted_stiffness(problem: DropletProblem, phi_prev: Field) -> sp.csr_matrix:
    """int |phi'|^2 grad mu_j . grad Psi_i."""
    return assemble_form(
        problem.scalar, problem.scalar,
        stiffness_kernel(lambda coeffs, x: coeffs[0].value ** 2),
        [phi_prev], degree=problem.degree,
    )


def convex_force(problem: DropletProblem, phi: Field) -> np.ndarray:
    """int W_+'(phi) Phi_i."""

    def kernel(v, coeffs, x):
        return v.value * double_well_convex_prime(coeffs[0].value)[:, :, None]

    return assemble_vector(problem.scalar, kernel, [phi], degree=problem.degree)


def convex_mass(problem: DropletProblem, phi: Field) -> sp.csr_matrix:
    """int W_+''(phi) Phi_j Phi_i."""
    return assemble_form(
        problem.scalar, problem.scalar,
        mass_kernel(lambda coeffs, x: double_well_convex_second(coeffs[0].value)),
        [phi], degree=problem.degree,
    )


def wetting_coefficient(problem: DropletProblem, bu_patch: np.ndarray) -> np.ndarray:
    """sigma_lg (cos(theta_eq) + Bu) at the wetting quadrature points."""
    p = problem.params
    return p.sigma_lg * (p.cos_theta_eq + problem.bu_at_quadrature(bu_patch))


def wetting_vector(problem: DropletProblem, phi_prev: Field, coefficient: np.ndarray) -> np.ndarray:
    """int_boundary c(x) theta'(phi') Phi_i for c given at the wetting quadrature points."""

    def kernel(v, coeffs, x):
        return v.value * (coefficient * eval_theta_family(coeffs[0].value).theta_p)[:, :, None]

    return assemble_boundary_vector(problem.scalar, kernel, coeff_fields=[phi_prev],
                                    quadrature=problem.quadrature)


def wetting_second_mass(problem: DropletProblem, phi_prev: Field, coefficient: np.ndarray) -> sp.csr_matrix:
    """int_boundary c(x) theta''(phi') Phi_j Phi_i."""

    def kernel(u, v, coeffs, x):
        w = coefficient * eval_theta_family(coeffs[0].value).theta_pp
        return np.einsum("sqj,sqi->sqij", u.value, v.value) * w[:, :, None, None]

    return assemble_boundary_form(problem.scalar, problem.scalar, kernel, coeff_fields=[phi_prev],
                                  quadrature=problem.quadrature)


# ---------------------------------------------------------------------------
# Navier-Stokes terms


def density_mass(problem: DropletProblem, phi: Field, phi_prev: Field) -> sp.csr_matrix:
    """int 1/2 (rho(phi) + rho(phi')) v_j . w_i."""
    params = problem.params

    def weight(coeffs, x):
        return 0.5 * (eval_rho(coeffs[0].value, params) + eval_rho(coeffs[1].value, params))

    return assemble_form(problem.velocity, problem.velocity, mass_kernel(weight),
                         [phi, phi_prev], degree=problem.degree)


def velocity_mass(problem: DropletProblem, phi: Field) -> sp.csr_matrix:
    """int rho(phi) v_j . w_i."""
    params = problem.params
    return assemble_form(
        problem.velocity, problem.velocity,
        mass_kernel(lambda coeffs, x: eval_rho(coeffs[0].value, params)),
        [phi], degree=problem.degree,
    )


def viscous_matrix(problem: DropletProblem, phi: Field) -> sp.csr_matrix:
    """int 2 eta(phi) Dv_j : Dw_i."""
    params = problem.params

    def kernel(u, v, coeffs, x):
        eta = eval_eta(coeffs[0].value, params)
        k = np.einsum("tqjcd,tqicd->tqij", _sym(u.grad), _sym(v.grad))
        return 2.0 * k * eta[:, :, None, None]

    return assemble_form(problem.velocity, problem.velocity, kernel, [phi], degree=problem.degree)


def transport_matrix(problem: DropletProblem, phi: Field, phi_prev: Field, mu: Field,
                     v_prev: Field) -> sp.csr_matrix:
    """Matrix of a(rho(phi') v' + J, ., .) with J = -b rho'(phi) grad mu."""
    params = problem.params

    def transport(coeffs, x):
        phi_q, phi_prev_q, mu_q, v_prev_q = coeffs
        rho_prev = eval_rho(phi_prev_q.value, params)
        flux = -params.b * eval_rho_prime(phi_q.value, params)[..., None] * mu_q.grad
        return rho_prev[..., None] * v_prev_q.value + flux

    return assemble_trilinear_a(
        transport, problem.velocity, problem.velocity,
        coeff_fields=[phi, phi_prev, mu, v_prev], degree=problem.degree,
    )


def capillary_matrix(problem: DropletProblem, phi_prev: Field) -> sp.csr_matrix:
    """int phi' grad mu_j . w_i (P1 columns, velocity rows)."""

    def kernel(u, v, coeffs, x):
        k = np.einsum("tqjd,tqid->tqij", u.grad, v.value)
        return k * coeffs[0].value[:, :, None, None]

    return assemble_form(problem.scalar, problem.velocity, kernel, [phi_prev], degree=problem.degree)


def gravity_load(problem: DropletProblem, phi: Field) -> np.ndarray:
    """int rho(phi) g . w_i."""
    params, g = problem.params, problem.gravity

    def kernel(v, coeffs, x):
        rho = eval_rho(coeffs[0].value, params)
        return np.einsum("tqic,c->tqi", v.value, g) * rho[:, :, None]

    return assemble_vector(problem.velocity, kernel, [phi], degree=problem.degree)


# ---------------------------------------------------------------------------
# Derivatives of the Navier-Stokes residual (velocity rows)


def ns_dphi(problem: DropletProblem, phi: Field, mu: Field, v: Field) -> sp.csr_matrix:
    """Derivative of the momentum residual with respect to phi^m."""
    params, tau, g = problem.params, problem.tau, problem.gravity

    def kernel(u, test, coeffs, x):
        phi_q, mu_q, v_q = coeffs
        basis = u.value
        rho_p = eval_rho_prime(phi_q.value, params)
        mass = 0.5 * np.einsum("tqj,tqc,tqic->tqij", basis * rho_p[..., None], v_q.value, test.value)
        U = (-params.b * eval_rho_second(phi_q.value, params))[..., None, None] \
            * basis[..., None] * mu_q.grad[:, :, None, :]
        transport = _transport_derivative(U, v_q.value, v_q.grad, test)
        eta_p = eval_eta_prime(phi_q.value, params)
        visc = 2.0 * np.einsum("tqj,tqcd,tqicd->tqij", basis * eta_p[..., None], _sym(v_q.grad), _sym(test.grad))
        grav = np.einsum("tqj,tqic,c->tqij", basis * rho_p[..., None], test.value, g)
        return mass + tau * (transport + visc - grav)

    return assemble_form(problem.scalar, problem.velocity, kernel, [phi, mu, v], degree=problem.degree)


def ns_dmu(problem: DropletProblem, phi: Field, phi_prev: Field, v: Field) -> sp.csr_matrix:
    """Derivative of the momentum residual with respect to mu^m."""
    params, tau = problem.params, problem.tau

    def kernel(u, test, coeffs, x):
        phi_q, phi_prev_q, v_q = coeffs
        U = (-params.b * eval_rho_prime(phi_q.value, params))[..., None, None] * u.grad
        transport = _transport_derivative(U, v_q.value, v_q.grad, test)
        cap = np.einsum("tqjd,tqid->tqij", u.grad, test.value) * phi_prev_q.value[:, :, None, None]
        return tau * (transport + cap)

    return assemble_form(problem.scalar, problem.velocity, kernel, [phi, phi_prev, v], degree=problem.degree)


def ns_dphi_prev(problem: DropletProblem, phi_prev: Field, mu: Field, v: Field, v_prev: Field) -> sp.csr_matrix:
    """Derivative of the momentum residual with respect to phi^(m-1)."""
    params, tau = problem.params, problem.tau

    def kernel(u, test, coeffs, x):
        phi_prev_q, mu_q, v_q, v_prev_q = coeffs
        basis = u.value * eval_rho_prime(phi_prev_q.value, params)[..., None]
        mass = np.einsum("tqj,tqc,tqic->tqij", basis, 0.5 * v_q.value - v_prev_q.value, test.value)
        U = basis[..., None] * v_prev_q.value[:, :, None, :]
        transport = _transport_derivative(U, v_q.value, v_q.grad, test)
        cap = np.einsum("tqj,tqd,tqid->tqij", u.value, mu_q.grad, test.value)
        return mass + tau * (transport + cap)

    return assemble_form(problem.scalar, problem.velocity, kernel, [phi_prev, mu, v, v_prev],
                         degree=problem.degree)


def ns_dv_prev(problem: DropletProblem, phi_prev: Field, v: Field) -> sp.csr_matrix:
    """Derivative of the momentum residual with respect to v^(m-1)."""
    params, tau = problem.params, problem.tau

    def kernel(u, test, coeffs, x):
        phi_prev_q, v_q = coeffs
        rho_prev = eval_rho(phi_prev_q.value, params)
        mass = np.einsum("tqjc,tqic->tqij", u.value, test.value) * rho_prev[:, :, None, None]
        U = u.value * rho_prev[:, :, None, None]
        return -mass + tau * _transport_derivative(U, v_q.value, v_q.grad, test)

    return assemble_form(problem.velocity, problem.velocity, kernel, [phi_prev, v], degree=problem.degree)


# ---------------------------------------------------------------------------
# Derivatives of the Cahn-Hilliard residual with respect to lagged values


def ch_flux_dphi_prev(problem: DropletProblem, phi_prev: Field, mu: Field, v_prev: Field) -> sp.csr_matrix:
    """Psi rows: -tau int Phi_j v' . grad Psi_i + tau^2/rho_min int 2 phi' Phi_j grad mu . grad Psi_i."""
    params, tau = problem.params, problem.tau
    stab = tau ** 2 / params.rho_min

    def kernel(u, test, coeffs, x):
        phi_prev_q, mu_q, v_prev_q = coeffs
        vector = -tau * v_prev_q.value + stab * 2.0 * phi_prev_q.value[..., None] * mu_q.grad
        return np.einsum("tqj,tqd,tqid->tqij", u.value, vector, test.grad)

    return assemble_form(problem.scalar, problem.scalar, kernel, [phi_prev, mu, v_prev], degree=problem.degree)


def ch_flux_dv_prev(problem: DropletProblem, phi_prev: Field) -> sp.csr_matrix:
    """Psi rows: -tau int phi' w_j . grad Psi_i (velocity columns)."""
    tau = problem.tau

    def kernel(u, test, coeffs, x):
        k = np.einsum("tqjc,tqic->tqij", u.value, test.grad)
        return -tau * k * coeffs[0].value[:, :, None, None]

    return assemble_form(problem.velocity, problem.scalar, kernel, [phi_prev], degree=problem.degree)
