"""
Control operator B, its time average B_m, its adjoint B* and the admissible projection.
"""
from typing import Optional

import numpy as np

from utils.errors import ControlError
from .grid import AdmissibleBox, ControlGrid, ControlVector

_WALL_TOL = 1e-12


def apply_B(u: ControlVector, t, x, y=None) -> np.ndarray:
    """
    Pointwise value of Bu = sum_rs u_rs g_r(t) f_s(x).

    Args:
        u: Control vector
        t: Time(s) in (0, T]
        x: Wall coordinate(s); or points of shape (..., 2) when y is None
        y: Height(s); points with y != 0 are off the controlled wall

    Returns:
        Bu with the broadcast shape of t and x; zero off the bottom wall
        and outside [0, Lx]
    """
    grid = u.grid
    if y is None:
        pts = np.asarray(x, dtype=float)
        x, y = pts[..., 0], pts[..., 1]
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    on_wall = (np.abs(y) <= _WALL_TOL) & (x >= -_WALL_TOL) & (x <= grid.Lx + _WALL_TOL)
    value = u.matrix[grid.interval_index(t), grid.patch_index(x)]
    return np.where(on_wall, value, 0.0)


def bu_for_step(u: ControlVector, m: int, tau: float, n_steps: Optional[int] = None) -> np.ndarray:
    """
    Per-patch values of B_m u = (1/tau) int_(t_(m-1))^(t_m) Bu dt.

    Args:
        u: Control vector
        m: Step index, 1 <= m
        tau: Time step
        n_steps: Number of steps (only used for the range check)

    Returns:
        (S,) exact step averages
    """
    if m < 1 or (n_steps is not None and m > n_steps):
        raise ControlError(f"step index {m} out of range")
    ov = u.grid.overlaps(tau, m)[m - 1]
    return ov @ u.matrix / tau


def bu_all_steps(u: ControlVector, tau: float, n_steps: int) -> np.ndarray:
    """(n_steps, S) array of B_m u for m = 1..n_steps."""
    return u.grid.overlaps(tau, n_steps) @ u.matrix / tau


def boundary_control_values(grid: ControlGrid, bu_patch: np.ndarray, points: np.ndarray,
                            on_bottom: np.ndarray) -> np.ndarray:
    """
    Piecewise constant Bu at boundary quadrature points.

    Args:
        grid: Control grid
        bu_patch: (S,) patch values of one step
        points: (s, Q, 2) boundary points
        on_bottom: (s,) mask of segments on the controlled wall

    Returns:
        (s, Q) values, zero on uncontrolled walls
    """
    values = np.asarray(bu_patch, dtype=float)[grid.patch_index(points[..., 0])]
    return np.where(np.asarray(on_bottom)[:, None], values, 0.0)


def patch_integrals(grid: ControlGrid, segment_values: np.ndarray, midpoints: np.ndarray) -> np.ndarray:
    """
    Sum per-segment boundary integrals into the patches.

    Segments must not straddle patch boundaries (split at grid.breakpoints).
    """
    return np.bincount(grid.patch_index(midpoints[:, 0]), weights=segment_values, minlength=grid.S)


def apply_B_star(grid: ControlGrid, q_patch: np.ndarray, tau: float) -> ControlVector:
    """
    Adjoint of B for step-wise data.

    Args:
        grid: Control grid
        q_patch: (M, S) per-step patch integrals int_(patch s) q^m ds
        tau: Time step

    Returns:
        ControlVector with (B* q)_rs = sum_m |step m n interval r| q_patch[m, s]
    """
    q_patch = np.atleast_2d(np.asarray(q_patch, dtype=float))
    if q_patch.shape[1] != grid.S:
        raise ControlError(f"expected {grid.S} patch columns, got {q_patch.shape[1]}")
    ov = grid.overlaps(tau, q_patch.shape[0])
    return ControlVector(grid, ov.T @ q_patch)


def project_admissible(u: ControlVector, box: AdmissibleBox) -> ControlVector:
    """Entrywise clamp of u_rs to [lo - cos(theta_eq), hi - cos(theta_eq)]."""
    return ControlVector(u.grid, np.clip(u.coefficients, box.lower, box.upper))


def bu_norm_sq(u: ControlVector) -> float:
    """||Bu||^2 in L2(0, T; L2(bottom))."""
    return float((u.grid.cell_measures * u.coefficients ** 2).sum())


def apply_BstarB(u: ControlVector) -> ControlVector:
    """B*B u, diagonal for the indicator basis."""
    return ControlVector(u.grid, u.grid.cell_measures * u.coefficients)
