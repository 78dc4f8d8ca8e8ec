"""
Finite-difference verification of reduced gradients.
"""
from typing import Callable, List, Sequence

import numpy as np
import pandas as pd

from control.grid import ControlGrid, ControlVector
from utils.errors import ControlError
from utils.logging import get_logger

logger = get_logger(__name__)


def random_directions(grid: ControlGrid, count: int, seed: int = 0) -> List[ControlVector]:
    """Unit-norm Gaussian directions, reproducible for a seed."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        d = rng.standard_normal(grid.size)
        out.append(ControlVector(grid, d / np.linalg.norm(d)))
    return out


def fd_gradient_report(
    objective: Callable[[ControlVector], float],
    u: ControlVector,
    gradient: ControlVector,
    directions: Sequence[ControlVector],
    epsilons: Sequence[float],
) -> pd.DataFrame:
    """
    Compare <g, d> with central differences (J(u + e d) - J(u - e d)) / (2 e).

    Args:
        objective: Control-to-cost map
        u: Point of the check
        gradient: Gradient at u
        directions: Nonzero directions
        epsilons: Step sizes of the sweep

    Returns:
        One row per (direction, eps) with columns direction, eps, fd,
        adjoint, abs_error, rel_error

    Raises:
        ControlError: On a zero direction
    """
    rows = []
    for k, d in enumerate(directions):
        if not np.any(d.coefficients):
            raise ControlError(f"direction {k} is zero")
        predicted = gradient.dot(d)
        for eps in epsilons:
            fd = (objective(u + eps * d) - objective(u - eps * d)) / (2.0 * eps)
            abs_error = abs(fd - predicted)
            scale = max(abs(predicted), abs(fd))
            rel_error = abs_error / scale if scale > 0.0 else 0.0
            rows.append({
                "direction": k,
                "eps": float(eps),
                "fd": float(fd),
                "adjoint": float(predicted),
                "abs_error": float(abs_error),
                "rel_error": float(rel_error),
            })
            logger.info(
                "Gradient check",
                extra={"extra_fields": {"direction": k, "eps": eps, "rel_error": rel_error}},
            )
    return pd.DataFrame(rows, columns=["direction", "eps", "fd", "adjoint", "abs_error", "rel_error"])


def best_errors(report: pd.DataFrame) -> pd.Series:
    """Smallest relative error per direction over the eps sweep."""
    return report.groupby("direction")["rel_error"].min()
