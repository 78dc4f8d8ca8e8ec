"""
Constitutive laws of the two-phase model.

All functions are vectorized over numpy arrays and accept scalars.
Phase +1 is liquid, phase -1 is gas.
"""
import math
from typing import NamedTuple

import numpy as np

from models.params import PhysicalParams, THETA_SECOND_MAX

# Width of the smooth blend of the density/viscosity clamp below |phi| = 1
CLAMP_DELTA = 0.1


class DoubleWellValues(NamedTuple):
    W: np.ndarray
    Wp_plus: np.ndarray
    Wp_minus: np.ndarray
    Wpp_plus: np.ndarray
    Wpp_minus: np.ndarray


class ThetaValues(NamedTuple):
    theta: np.ndarray
    theta_p: np.ndarray
    theta_pp: np.ndarray


# ---------------------------------------------------------------------------
# Double well W = W_+ + W_-: quartic inside [-1, 1], quadratic outside


def double_well(phi):
    phi = np.asarray(phi, dtype=float)
    a = np.abs(phi)
    return np.where(a <= 1.0, 0.25 * (1.0 - phi ** 2) ** 2, (a - 1.0) ** 2)


def double_well_prime(phi):
    return double_well_convex_prime(phi) + double_well_concave_prime(phi)


def double_well_convex(phi):
    phi = np.asarray(phi, dtype=float)
    a = np.abs(phi)
    return np.where(a <= 1.0, 0.25 * phi ** 4 - 0.25, 0.5 * (3.0 * phi ** 2 - 4.0 * a + 1.0))


def double_well_convex_prime(phi):
    phi = np.asarray(phi, dtype=float)
    return np.where(np.abs(phi) <= 1.0, phi ** 3, 3.0 * phi - 2.0 * np.sign(phi))


def double_well_convex_second(phi):
    phi = np.asarray(phi, dtype=float)
    return np.where(np.abs(phi) <= 1.0, 3.0 * phi ** 2, 3.0)


def double_well_concave(phi):
    phi = np.asarray(phi, dtype=float)
    return 0.5 * (1.0 - phi ** 2)


def double_well_concave_prime(phi):
    return -np.asarray(phi, dtype=float)


def double_well_concave_second(phi):
    return np.full_like(np.asarray(phi, dtype=float), -1.0)


def eval_W_family(phi) -> DoubleWellValues:
    """W and the derivatives of its convex/concave parts at phi."""
    return DoubleWellValues(
        double_well(phi),
        double_well_convex_prime(phi),
        double_well_concave_prime(phi),
        double_well_convex_second(phi),
        double_well_concave_second(phi),
    )


# ---------------------------------------------------------------------------
# C^2 monotone clamp s: identity on |phi| <= 1 - delta, +-1 beyond |phi| >= 1


def _blend(t):
    return t + 4.0 * t ** 3 - 7.0 * t ** 4 + 3.0 * t ** 5


def _blend_prime(t):
    return (1.0 - t) ** 2 * (1.0 + 2.0 * t + 15.0 * t ** 2)


def _blend_second(t):
    return 24.0 * t - 84.0 * t ** 2 + 60.0 * t ** 3


def _clamp_parts(phi, delta):
    phi = np.asarray(phi, dtype=float)
    a = np.abs(phi)
    inner = a <= 1.0 - delta
    t = np.clip((a - (1.0 - delta)) / delta, 0.0, 1.0)
    return phi, a, inner, t


def clamp(phi, delta: float = CLAMP_DELTA):
    phi, a, inner, t = _clamp_parts(phi, delta)
    return np.where(inner, phi, np.sign(phi) * (1.0 - delta + delta * _blend(t)))


def clamp_prime(phi, delta: float = CLAMP_DELTA):
    phi, a, inner, t = _clamp_parts(phi, delta)
    return np.where(inner, 1.0, _blend_prime(t))


def clamp_second(phi, delta: float = CLAMP_DELTA):
    phi, a, inner, t = _clamp_parts(phi, delta)
    return np.where(inner, 0.0, np.sign(phi) * _blend_second(t) / delta)


# ---------------------------------------------------------------------------
# Density and viscosity


def _interpolate(phi, plus: float, minus: float, derivative: int = 0):
    mean, half_jump = 0.5 * (plus + minus), 0.5 * (plus - minus)
    if derivative == 0:
        return mean + half_jump * clamp(phi)
    if derivative == 1:
        return half_jump * clamp_prime(phi)
    return half_jump * clamp_second(phi)


def eval_rho(phi, params: PhysicalParams):
    return _interpolate(phi, params.rho_l, params.rho_g)


def eval_rho_prime(phi, params: PhysicalParams):
    return _interpolate(phi, params.rho_l, params.rho_g, 1)


def eval_rho_second(phi, params: PhysicalParams):
    return _interpolate(phi, params.rho_l, params.rho_g, 2)


def eval_eta(phi, params: PhysicalParams):
    return _interpolate(phi, params.eta_l, params.eta_g)


def eval_eta_prime(phi, params: PhysicalParams):
    return _interpolate(phi, params.eta_l, params.eta_g, 1)


# ---------------------------------------------------------------------------
# Contact-line interpolation theta(phi) = sin(pi/2 clip(phi)) / 2


def eval_theta_family(phi) -> ThetaValues:
    phi = np.asarray(phi, dtype=float)
    inside = np.abs(phi) < 1.0
    arg = 0.5 * math.pi * np.clip(phi, -1.0, 1.0)
    theta = 0.5 * np.sin(arg)
    theta_p = np.where(inside, 0.25 * math.pi * np.cos(arg), 0.0)
    theta_pp = np.where(inside, -THETA_SECOND_MAX * np.sin(arg), 0.0)
    return ThetaValues(theta, theta_p, theta_pp)


def contact_energy(phi, bu, params: PhysicalParams):
    """gamma_u(phi) = sigma_lg (cos(theta_eq) + Bu) theta(phi)."""
    return params.sigma_lg * (params.cos_theta_eq + bu) * eval_theta_family(phi).theta


def contact_energy_prime(phi, bu, params: PhysicalParams):
    return params.sigma_lg * (params.cos_theta_eq + bu) * eval_theta_family(phi).theta_p


def compute_S_gamma(params: PhysicalParams) -> float:
    """1/2 sigma_lg max|theta''| under the admissible bound |cos(theta_eq) + Bu| <= 1."""
    return params.S_gamma


def gravity_vector(params: PhysicalParams) -> np.ndarray:
    """g_mag (sin(alpha), -cos(alpha)) for the inclination alpha."""
    alpha = math.radians(params.incline_deg)
    return params.g_mag * np.array([math.sin(alpha), -math.cos(alpha)])
