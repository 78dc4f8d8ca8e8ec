"""
First-order optimality check on the admissible box.
"""
import numpy as np

from control.grid import AdmissibleBox, ControlVector

ACTIVE_TOL = 1e-10


def kkt_violations(u: ControlVector, gradient: ControlVector, box: AdmissibleBox,
                   active_tol: float = ACTIVE_TOL) -> np.ndarray:
    """
    Per-coefficient violation of <g, w - u> >= 0 for all admissible w.

    Interior coefficients need g = 0, coefficients at the lower bound g >= 0,
    coefficients at the upper bound g <= 0.
    """
    c, g = u.coefficients, gradient.coefficients
    at_lower = c <= box.lower + active_tol
    at_upper = c >= box.upper - active_tol
    out = np.abs(g)
    out = np.where(at_lower, np.maximum(0.0, -g), out)
    out = np.where(at_upper, np.maximum(0.0, g), out)
    return out


def evaluate_variational_inequality(u: ControlVector, gradient: ControlVector, box: AdmissibleBox) -> float:
    """Worst KKT violation of u."""
    violations = kkt_violations(u, gradient, box)
    return float(violations.max()) if violations.size else 0.0
