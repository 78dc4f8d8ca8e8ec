"""
Quadrature rules on the reference triangle and the unit interval.

Triangle weights sum to one, so the integral over a physical triangle T is
``|T| * sum(w * f(x_q))``.
"""
from typing import Dict, NamedTuple

import numpy as np

from utils.errors import AssemblyError


class TriangleRule(NamedTuple):
    degree: int
    points: np.ndarray   # (Q, 2) reference coordinates (xi, eta)
    weights: np.ndarray  # (Q,)


class LineRule(NamedTuple):
    points: np.ndarray   # (Q,) on [0, 1]
    weights: np.ndarray  # (Q,), summing to 1


def _orbit3(a: float, w: float):
    b = 0.5 * (1.0 - a)
    return [(a, b, b), (b, a, b), (b, b, a)], [w] * 3


def _orbit6(a: float, b: float, w: float):
    c = 1.0 - a - b
    bary = [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]
    return bary, [w] * 6


def _from_barycentric(degree: int, orbits) -> TriangleRule:
    bary, weights = [], []
    for pts, ws in orbits:
        bary.extend(pts)
        weights.extend(ws)
    bary = np.array(bary)
    # lambda_0 = 1 - xi - eta, lambda_1 = xi, lambda_2 = eta
    points = np.column_stack([bary[:, 1], bary[:, 2]])
    return TriangleRule(degree, points, np.array(weights))


def _build_rules() -> Dict[int, TriangleRule]:
    rules = {
        1: TriangleRule(1, np.array([[1.0 / 3.0, 1.0 / 3.0]]), np.array([1.0])),
        2: _from_barycentric(2, [_orbit3(2.0 / 3.0, 1.0 / 3.0)]),
        # Dunavant, 6 points
        4: _from_barycentric(4, [
            _orbit3(0.108103018168070227360, 0.223381589678011465944),
            _orbit3(0.816847572980458513080, 0.109951743655321867389),
        ]),
        # Dunavant, 12 points
        6: _from_barycentric(6, [
            _orbit3(0.501426509658179157416, 0.116786275726379366030),
            _orbit3(0.873821971016995543320, 0.050844906370206816921),
            _orbit6(0.053145049844816947353, 0.310352451033784405416,
                    0.082851075618373575194),
        ]),
    }
    return rules


_RULES = _build_rules()


def triangle_rule(degree: int) -> TriangleRule:
    """
    Smallest available rule exact for polynomials of the requested degree.

    Args:
        degree: Polynomial degree to integrate exactly

    Returns:
        TriangleRule

    Raises:
        AssemblyError: If no rule of that degree is available
    """
    for available in sorted(_RULES):
        if available >= degree:
            return _RULES[available]
    raise AssemblyError(f"no triangle rule of degree {degree} (max {max(_RULES)})")


def line_rule(n_points: int) -> LineRule:
    """Gauss-Legendre rule with ``n_points`` points mapped to [0, 1]."""
    if n_points < 1:
        raise AssemblyError(f"line rule needs at least one point, got {n_points}")
    x, w = np.polynomial.legendre.leggauss(n_points)
    return LineRule(0.5 * (x + 1.0), 0.5 * w)
