"""
Sparse direct solves.
"""
import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from utils.errors import LinearSolveFailed
from utils.logging import get_logger

logger = get_logger(__name__)


class Factorization:
    """
    Sparse LU factorization reusable for several right-hand sides and for
    transposed solves.

    Raises:
        LinearSolveFailed: If the matrix is singular or the factorization fails
    """

    def __init__(self, matrix: sp.spmatrix, what: str = "system"):
        self.what = what
        self.shape = matrix.shape
        try:
            self._lu = splu(sp.csc_matrix(matrix))
        except (RuntimeError, ValueError) as e:
            logger.error(
                "Sparse factorization failed",
                extra={"extra_fields": {"system": what, "shape": list(matrix.shape), "error": str(e)}},
            )
            raise LinearSolveFailed(f"factorization of the {what} failed: {e}") from e

    def solve(self, rhs: np.ndarray, transpose: bool = False) -> np.ndarray:
        x = self._lu.solve(np.asarray(rhs, dtype=float), trans="T" if transpose else "N")
        if not np.all(np.isfinite(x)):
            raise LinearSolveFailed(f"{self.what} solve produced non-finite values")
        return x


def solve(matrix: sp.spmatrix, rhs: np.ndarray, transpose: bool = False, what: str = "system") -> np.ndarray:
    """Factorize and solve once."""
    return Factorization(matrix, what).solve(rhs, transpose)
