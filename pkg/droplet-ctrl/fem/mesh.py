"""
Structured triangulations of a rectangle with tagged boundary segments.

Nodes are numbered row by row, ``node = j * (nx + 1) + i``. Every grid cell
with corners a=(i, j), b=(i+1, j), c=(i+1, j+1), d=(i, j+1) is split along
the a-c diagonal into the counterclockwise triangles (a, b, c) and (a, c, d).
"""
from typing import Dict, List, Tuple

import numpy as np

from utils.errors import MeshError

BOUNDARY_TAGS: Tuple[str, ...] = ("bottom", "right", "top", "left")

# Local edge k of a triangle joins local vertices LOCAL_EDGES[k].
LOCAL_EDGES = np.array([[0, 1], [1, 2], [2, 0]])


class Mesh:
    """
    Triangle mesh of the rectangle (0, Lx) x (0, Ly).

    Attributes:
        nodes: (N, 2) vertex coordinates
        triangles: (T, 3) counterclockwise vertex indices
        boundary_edges: (B, 2) vertex index pairs on the rectangle boundary
        boundary_tags: (B,) side tag of each boundary edge
        edges: (E, 2) unique edges, vertex pairs sorted ascending
        triangle_edges: (T, 3) global edge id of local edge k
        boundary_edge_ids: (B,) global edge id of each boundary edge
    """

    def __init__(
        self,
        nodes: np.ndarray,
        triangles: np.ndarray,
        boundary_edges: np.ndarray,
        boundary_tags: np.ndarray,
        Lx: float,
        Ly: float,
    ):
        self.nodes = np.ascontiguousarray(nodes, dtype=float)
        self.triangles = np.ascontiguousarray(triangles, dtype=np.int64)
        self.boundary_edges = np.ascontiguousarray(boundary_edges, dtype=np.int64)
        self.boundary_tags = np.asarray(boundary_tags)
        self.Lx = float(Lx)
        self.Ly = float(Ly)

        local = self.triangles[:, LOCAL_EDGES]
        local = np.sort(local, axis=2).reshape(-1, 2)
        self.edges, inverse = np.unique(local, axis=0, return_inverse=True)
        self.triangle_edges = np.asarray(inverse).reshape(-1, 3)
        self.boundary_edge_ids = self._lookup_edges(self.boundary_edges)

        self.validate()

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]

    @property
    def tags(self) -> List[str]:
        return [tag for tag in BOUNDARY_TAGS if np.any(self.boundary_tags == tag)]

    @property
    def signed_areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    @property
    def h(self) -> float:
        """Longest edge length."""
        d = self.nodes[self.edges[:, 1]] - self.nodes[self.edges[:, 0]]
        return float(np.sqrt((d ** 2).sum(axis=1)).max())

    def edges_with_tag(self, tag: str) -> np.ndarray:
        """Indices into ``boundary_edges`` carrying ``tag``."""
        return np.flatnonzero(self.boundary_tags == tag)

    def boundary_nodes(self, tag: str) -> np.ndarray:
        return np.unique(self.boundary_edges[self.edges_with_tag(tag)])

    def _lookup_edges(self, pairs: np.ndarray) -> np.ndarray:
        n = self.n_nodes
        keys = self.edges[:, 0] * n + self.edges[:, 1]
        sorted_pairs = np.sort(pairs, axis=1)
        wanted = sorted_pairs[:, 0] * n + sorted_pairs[:, 1]
        idx = np.searchsorted(keys, wanted)
        idx = np.clip(idx, 0, len(keys) - 1)
        if not np.array_equal(keys[idx], wanted):
            raise MeshError("boundary edge not found among triangle edges")
        return idx

    def validate(self) -> None:
        """
        Check the mesh invariants.

        Raises:
            MeshError: On non-positive triangle areas, boundary edges not
                owned by exactly one triangle, or tagged edges that do not
                cover the rectangle boundary.
        """
        areas = self.signed_areas
        if np.any(areas <= 0.0):
            bad = int(np.flatnonzero(areas <= 0.0)[0])
            raise MeshError(f"triangle {bad} has non-positive signed area {areas[bad]:.3e}")

        owners = np.bincount(self.triangle_edges.ravel(), minlength=self.n_edges)
        if np.any(owners[self.boundary_edge_ids] != 1):
            raise MeshError("every boundary edge must belong to exactly one triangle")

        outer = np.flatnonzero(owners == 1)
        if not np.array_equal(np.sort(outer), np.sort(self.boundary_edge_ids)):
            raise MeshError("tagged boundary edges do not match the mesh boundary")

        expected = {"bottom": self.Lx, "top": self.Lx, "left": self.Ly, "right": self.Ly}
        for tag, length in expected.items():
            idx = self.edges_with_tag(tag)
            d = self.nodes[self.boundary_edges[idx, 1]] - self.nodes[self.boundary_edges[idx, 0]]
            total = float(np.sqrt((d ** 2).sum(axis=1)).sum())
            if abs(total - length) > 1e-12 * max(1.0, length):
                raise MeshError(f"tag {tag!r} covers length {total}, expected {length}")

    def summary(self) -> Dict[str, float]:
        return {
            "nodes": self.n_nodes,
            "triangles": self.n_triangles,
            "edges": self.n_edges,
            "h": self.h,
        }


def build_rect_mesh(nx: int, ny: int, Lx: float, Ly: float) -> Mesh:
    """
    Build the right-diagonal triangulation of (0, Lx) x (0, Ly).

    Args:
        nx: Number of cells in x
        ny: Number of cells in y
        Lx: Width
        Ly: Height

    Returns:
        Mesh with 2 * nx * ny triangles and edges tagged bottom/right/top/left

    Raises:
        MeshError: If a cell count is below 1 or a length is not positive
    """
    if int(nx) != nx or int(ny) != ny or nx < 1 or ny < 1:
        raise MeshError(f"cell counts must be integers >= 1, got nx={nx}, ny={ny}")
    if not (np.isfinite(Lx) and np.isfinite(Ly)) or Lx <= 0 or Ly <= 0:
        raise MeshError(f"domain lengths must be positive, got Lx={Lx}, Ly={Ly}")
    nx, ny = int(nx), int(ny)

    x = np.linspace(0.0, Lx, nx + 1)
    y = np.linspace(0.0, Ly, ny + 1)
    X, Y = np.meshgrid(x, y)
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    i, j = np.meshgrid(np.arange(nx), np.arange(ny))
    a = (j * (nx + 1) + i).ravel()
    b = a + 1
    c = a + nx + 2
    d = a + nx + 1
    triangles = np.empty((2 * a.size, 3), dtype=np.int64)
    triangles[0::2] = np.column_stack([a, b, c])
    triangles[1::2] = np.column_stack([a, c, d])

    row = np.arange(nx)
    col = np.arange(ny)
    bottom = np.column_stack([row, row + 1])
    top = np.column_stack([ny * (nx + 1) + row, ny * (nx + 1) + row + 1])
    left = np.column_stack([col * (nx + 1), (col + 1) * (nx + 1)])
    right = np.column_stack([col * (nx + 1) + nx, (col + 1) * (nx + 1) + nx])

    boundary_edges = np.vstack([bottom, right, top, left])
    boundary_tags = np.array(
        ["bottom"] * nx + ["right"] * ny + ["top"] * nx + ["left"] * ny
    )
    return Mesh(nodes, triangles, boundary_edges, boundary_tags, Lx, Ly)
