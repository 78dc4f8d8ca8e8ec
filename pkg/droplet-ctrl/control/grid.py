"""
Control space R^(R*S): time intervals x bottom patches.

Control coefficient u_rs multiplies the indicator of time interval r,
(r T/R, (r+1) T/R], times the indicator of bottom patch s,
[s Lx/S, (s+1) Lx/S). Coefficients are stored row-major by (r, s).
"""
import math
from typing import Iterable, Optional

import numpy as np

from utils.errors import ControlError

_TIE = 1e-9


class ControlGrid:
    """Time-interval x boundary-patch partition of (0, T] x [0, Lx)."""

    def __init__(self, R: int, S: int, T: float, Lx: float = 1.0):
        if int(R) != R or int(S) != S or R < 1 or S < 1:
            raise ControlError(f"R and S must be integers >= 1, got R={R}, S={S}")
        if not (T > 0.0 and Lx > 0.0):
            raise ControlError(f"horizon and wall length must be positive, got T={T}, Lx={Lx}")
        self.R = int(R)
        self.S = int(S)
        self.T = float(T)
        self.Lx = float(Lx)

    @property
    def size(self) -> int:
        return self.R * self.S

    @property
    def interval_length(self) -> float:
        return self.T / self.R

    @property
    def patch_length(self) -> float:
        return self.Lx / self.S

    @property
    def interval_bounds(self) -> np.ndarray:
        edges = np.linspace(0.0, self.T, self.R + 1)
        return np.column_stack([edges[:-1], edges[1:]])

    @property
    def patch_bounds(self) -> np.ndarray:
        edges = np.linspace(0.0, self.Lx, self.S + 1)
        return np.column_stack([edges[:-1], edges[1:]])

    @property
    def breakpoints(self) -> np.ndarray:
        """Interior patch boundaries on the wall."""
        return self.patch_bounds[1:, 0]

    @property
    def cell_measures(self) -> np.ndarray:
        """|interval_r| |patch_s| per coefficient, row-major."""
        return np.full(self.size, self.interval_length * self.patch_length)

    def interval_index(self, t):
        """Interval r with t in (r T/R, (r+1) T/R]; t = 0 maps to interval 0."""
        r = np.ceil(np.asarray(t, dtype=float) * self.R / self.T - _TIE) - 1
        return np.clip(r, 0, self.R - 1).astype(np.int64)

    def patch_index(self, x):
        """Patch s with x in [s Lx/S, (s+1) Lx/S); x = Lx maps to the last patch."""
        s = np.floor(np.asarray(x, dtype=float) * self.S / self.Lx + _TIE)
        return np.clip(s, 0, self.S - 1).astype(np.int64)

    def overlaps(self, tau: float, n_steps: int) -> np.ndarray:
        """
        Overlap lengths of the time steps with the control intervals.

        Returns:
            (n_steps, R) array, entry [m - 1, r] = |(t_(m-1), t_m] n interval r|
        """
        steps = np.arange(n_steps + 1) * tau
        lo_s, hi_s = steps[:-1, None], steps[1:, None]
        bounds = self.interval_bounds
        lo_r, hi_r = bounds[None, :, 0], bounds[None, :, 1]
        return np.maximum(0.0, np.minimum(hi_s, hi_r) - np.maximum(lo_s, lo_r))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ControlGrid)
            and (self.R, self.S) == (other.R, other.S)
            and math.isclose(self.T, other.T)
            and math.isclose(self.Lx, other.Lx)
        )

    def __repr__(self) -> str:
        return f"ControlGrid(R={self.R}, S={self.S}, T={self.T}, Lx={self.Lx})"


class ControlVector:
    """Coefficients u_rs on a ControlGrid (value semantics)."""

    def __init__(self, grid: ControlGrid, coefficients: Optional[Iterable[float]] = None):
        self.grid = grid
        if coefficients is None:
            values = np.zeros(grid.size)
        else:
            values = np.array(coefficients, dtype=float).ravel()
        if values.size != grid.size:
            raise ControlError(f"control has {values.size} coefficients, grid needs {grid.size}")
        if not np.all(np.isfinite(values)):
            raise ControlError("control coefficients must be finite")
        self.coefficients = values
        self.coefficients.setflags(write=False)

    @classmethod
    def constant(cls, grid: ControlGrid, value: float) -> "ControlVector":
        return cls(grid, np.full(grid.size, float(value)))

    @property
    def matrix(self) -> np.ndarray:
        """(R, S) view of the coefficients."""
        return self.coefficients.reshape(self.grid.R, self.grid.S)

    def __add__(self, other: "ControlVector") -> "ControlVector":
        return ControlVector(self.grid, self.coefficients + other.coefficients)

    def __sub__(self, other: "ControlVector") -> "ControlVector":
        return ControlVector(self.grid, self.coefficients - other.coefficients)

    def __mul__(self, scalar: float) -> "ControlVector":
        return ControlVector(self.grid, float(scalar) * self.coefficients)

    __rmul__ = __mul__

    def dot(self, other: "ControlVector") -> float:
        return float(self.coefficients @ other.coefficients)

    def __repr__(self) -> str:
        return f"ControlVector(R={self.grid.R}, S={self.grid.S})"


class AdmissibleBox:
    """lo <= cos(theta_eq) + Bu <= hi, as per-coefficient bounds on u."""

    def __init__(self, lo: float, hi: float, theta_eq_deg: float):
        if not lo < hi:
            raise ControlError(f"box needs lo < hi, got lo={lo}, hi={hi}")
        self.lo = float(lo)
        self.hi = float(hi)
        self.theta_eq_deg = float(theta_eq_deg)

    @property
    def cos_theta_eq(self) -> float:
        return math.cos(math.radians(self.theta_eq_deg))

    @property
    def lower(self) -> float:
        return self.lo - self.cos_theta_eq

    @property
    def upper(self) -> float:
        return self.hi - self.cos_theta_eq

    def contains(self, u: ControlVector, tol: float = 1e-12) -> bool:
        c = u.coefficients
        return bool(np.all(c >= self.lower - tol) and np.all(c <= self.upper + tol))

    def __repr__(self) -> str:
        return f"AdmissibleBox([{self.lower:.4g}, {self.upper:.4g}])"
