"""
Diffuse droplet profiles.
"""
import math
from typing import Sequence

import numpy as np

from fem.space import Field, FunctionSpace, interpolate


def phi0_profile(z):
    """Optimal one-dimensional interface profile tanh(z / sqrt(2))."""
    return np.tanh(np.asarray(z, dtype=float) / math.sqrt(2.0))


def initial_droplet(center: Sequence[float], radius: float, eps: float, space: FunctionSpace) -> Field:
    """
    Radial tanh droplet, liquid (+1) inside the circle and gas (-1) outside.

    Args:
        center: Droplet center m; a center on the wall gives a cap
        radius: Radius r0
        eps: Interface width
        space: Scalar target space

    Returns:
        Nodal interpolant of phi0_profile((r0 - |x - m|) / eps)
    """
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    cx, cy = float(center[0]), float(center[1])

    def profile(x, y):
        return phi0_profile((radius - np.hypot(x - cx, y - cy)) / eps)

    return interpolate(profile, space)


def pure_phase(space: FunctionSpace, value: float = 1.0) -> Field:
    return Field(space, np.full(space.dof_count, float(value)))
