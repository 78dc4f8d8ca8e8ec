"""
Lagrange elements on the reference triangle (0,0), (1,0), (0,1).

Barycentric coordinates are lambda_0 = 1 - xi - eta, lambda_1 = xi,
lambda_2 = eta. P2 functions 3, 4, 5 sit on local edges (0,1), (1,2), (2,0).
"""
import numpy as np

from utils.errors import AssemblyError

_GRAD_LAMBDA = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
_P2_EDGES = ((0, 1), (1, 2), (2, 0))


def _barycentric(points: np.ndarray) -> np.ndarray:
    points = np.atleast_2d(points)
    xi, eta = points[:, 0], points[:, 1]
    return np.column_stack([1.0 - xi - eta, xi, eta])


class LagrangeElement:
    """Scalar P1 or P2 element."""

    def __init__(self, degree: int):
        if degree not in (1, 2):
            raise AssemblyError(f"only P1 and P2 elements are available, got P{degree}")
        self.degree = degree
        self.n_local = 3 if degree == 1 else 6
        self.n_edge_local = 2 if degree == 1 else 3

    def values(self, points: np.ndarray) -> np.ndarray:
        """Basis values at reference points, shape (Q, n_local)."""
        lam = _barycentric(points)
        if self.degree == 1:
            return lam
        out = np.empty((lam.shape[0], 6))
        for i in range(3):
            out[:, i] = lam[:, i] * (2.0 * lam[:, i] - 1.0)
        for k, (i, j) in enumerate(_P2_EDGES):
            out[:, 3 + k] = 4.0 * lam[:, i] * lam[:, j]
        return out

    def gradients(self, points: np.ndarray) -> np.ndarray:
        """Reference gradients at reference points, shape (Q, n_local, 2)."""
        lam = _barycentric(points)
        q = lam.shape[0]
        if self.degree == 1:
            return np.broadcast_to(_GRAD_LAMBDA, (q, 3, 2)).copy()
        out = np.empty((q, 6, 2))
        for i in range(3):
            out[:, i, :] = (4.0 * lam[:, i] - 1.0)[:, None] * _GRAD_LAMBDA[i]
        for k, (i, j) in enumerate(_P2_EDGES):
            out[:, 3 + k, :] = 4.0 * (
                lam[:, i, None] * _GRAD_LAMBDA[j] + lam[:, j, None] * _GRAD_LAMBDA[i]
            )
        return out

    def edge_values(self, t: np.ndarray) -> np.ndarray:
        """
        Trace basis on an edge parametrized from its first to its second vertex.

        Args:
            t: Edge parameters in [0, 1], any shape

        Returns:
            Array of shape t.shape + (n_edge_local,). For P2 the last entry
            belongs to the edge midpoint.
        """
        t = np.asarray(t, dtype=float)
        if self.degree == 1:
            return np.stack([1.0 - t, t], axis=-1)
        return np.stack(
            [(1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t)],
            axis=-1,
        )
