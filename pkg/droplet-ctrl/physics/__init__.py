"""Constitutive laws and droplet profiles."""
from .material import (
    compute_S_gamma,
    eval_eta,
    eval_eta_prime,
    eval_rho,
    eval_rho_prime,
    eval_rho_second,
    eval_theta_family,
    eval_W_family,
    gravity_vector,
)
from .droplet import initial_droplet, phi0_profile, pure_phase

__all__ = [
    "compute_S_gamma",
    "eval_eta",
    "eval_eta_prime",
    "eval_rho",
    "eval_rho_prime",
    "eval_rho_second",
    "eval_theta_family",
    "eval_W_family",
    "gravity_vector",
    "initial_droplet",
    "phi0_profile",
    "pure_phase",
]
