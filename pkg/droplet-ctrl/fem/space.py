"""
Finite element spaces, fields and nodal interpolation.

Vector spaces are component-blocked: global dof ``c * n_scalar + i`` is
component ``c`` of scalar dof ``i``, local function ``c * n_local + k`` is
component ``c`` of scalar local function ``k``.
"""
from typing import Callable, Literal, Optional, Sequence, Union

import numpy as np

from utils.errors import AssemblyError
from .element import LagrangeElement
from .mesh import Mesh

SpaceKind = Literal["P1", "P2", "P2vec"]


class FunctionSpace:
    """Lagrange space on a mesh."""

    def __init__(self, mesh: Mesh, kind: SpaceKind):
        if kind not in ("P1", "P2", "P2vec"):
            raise AssemblyError(f"unknown space kind {kind!r}")
        self.mesh = mesh
        self.kind = kind
        self.element = LagrangeElement(1 if kind == "P1" else 2)
        self.n_components = 2 if kind == "P2vec" else 1

        if self.element.degree == 1:
            scalar_map = mesh.triangles.copy()
            self.n_scalar = mesh.n_nodes
        else:
            scalar_map = np.hstack([mesh.triangles, mesh.n_nodes + mesh.triangle_edges])
            self.n_scalar = mesh.n_nodes + mesh.n_edges
        self.scalar_dof_map = scalar_map

        if self.n_components == 1:
            self.dof_map = scalar_map
        else:
            self.dof_map = np.hstack([scalar_map, scalar_map + self.n_scalar])
        self.dof_count = self.n_scalar * self.n_components

    @property
    def is_vector(self) -> bool:
        return self.n_components == 2

    @property
    def n_local(self) -> int:
        return self.element.n_local * self.n_components

    @property
    def dof_coordinates(self) -> np.ndarray:
        """Coordinates of the scalar dofs, shape (n_scalar, 2)."""
        mesh = self.mesh
        if self.element.degree == 1:
            return mesh.nodes
        mid = 0.5 * (mesh.nodes[mesh.edges[:, 0]] + mesh.nodes[mesh.edges[:, 1]])
        return np.vstack([mesh.nodes, mid])

    def boundary_scalar_dofs(self, tag: str) -> np.ndarray:
        """Scalar dofs lying on edges tagged ``tag``."""
        idx = self.mesh.edges_with_tag(tag)
        if idx.size == 0:
            raise AssemblyError(f"unknown boundary tag {tag!r}")
        dofs = [self.mesh.boundary_edges[idx].ravel()]
        if self.element.degree == 2:
            dofs.append(self.mesh.n_nodes + self.mesh.boundary_edge_ids[idx])
        return np.unique(np.concatenate(dofs))

    def boundary_dofs(self, tag: str, component: Optional[int] = None) -> np.ndarray:
        """
        Global dofs on a tagged side.

        Args:
            tag: Boundary tag
            component: Vector component (all components when None)

        Returns:
            Sorted global dof indices
        """
        scalar = self.boundary_scalar_dofs(tag)
        if not self.is_vector:
            return scalar
        comps = range(2) if component is None else [component]
        return np.unique(np.concatenate([scalar + c * self.n_scalar for c in comps]))

    def edge_dof_map(self, boundary_index: np.ndarray) -> np.ndarray:
        """Scalar dofs of boundary edges in trace-basis order, shape (E, n_edge_local)."""
        if self.is_vector:
            raise AssemblyError("boundary traces are only available for scalar spaces")
        pairs = self.mesh.boundary_edges[boundary_index]
        if self.element.degree == 1:
            return pairs
        mids = self.mesh.n_nodes + self.mesh.boundary_edge_ids[boundary_index]
        return np.column_stack([pairs, mids])

    def __repr__(self) -> str:
        return f"FunctionSpace({self.kind}, dofs={self.dof_count})"


class TaylorHoodSpace:
    """P2 vector velocity / P1 pressure pair with one global unknown vector."""

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        self.velocity = FunctionSpace(mesh, "P2vec")
        self.pressure = FunctionSpace(mesh, "P1")
        self.kind = "TaylorHood"
        self.dof_count = self.velocity.dof_count + self.pressure.dof_count

    def split(self, x: np.ndarray):
        nv = self.velocity.dof_count
        return Field(self.velocity, x[:nv]), Field(self.pressure, x[nv:nv + self.pressure.dof_count])


class Field:
    """Coefficient vector on a function space."""

    def __init__(self, space: FunctionSpace, coefficients: Optional[np.ndarray] = None):
        self.space = space
        if coefficients is None:
            coefficients = np.zeros(space.dof_count)
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.shape != (space.dof_count,):
            raise AssemblyError(
                f"field has {coefficients.shape} coefficients, space {space.kind} has {space.dof_count}"
            )
        self.coefficients = coefficients

    @property
    def values(self) -> np.ndarray:
        return self.coefficients

    def copy(self) -> "Field":
        return Field(self.space, self.coefficients.copy())

    def component(self, c: int) -> np.ndarray:
        """Scalar coefficients of one component of a vector field."""
        n = self.space.n_scalar
        return self.coefficients[c * n:(c + 1) * n]

    def __repr__(self) -> str:
        return f"Field({self.space.kind}, n={self.coefficients.size})"


PointFunction = Callable[[np.ndarray, np.ndarray], Union[np.ndarray, Sequence[np.ndarray], float]]


def interpolate(f: PointFunction, space: FunctionSpace) -> Field:
    """
    Nodal interpolation of ``f(x, y)``.

    Args:
        f: Function of coordinate arrays; for vector spaces it returns the
            two components (as a tuple or an array with a trailing axis 2)
        space: Target space

    Returns:
        Interpolated Field

    Raises:
        AssemblyError: If f is not finite at a dof coordinate
    """
    xy = space.dof_coordinates
    raw = f(xy[:, 0], xy[:, 1])
    n = space.n_scalar
    if space.is_vector:
        if isinstance(raw, (tuple, list)):
            comps = [np.broadcast_to(np.asarray(r, dtype=float), (n,)) for r in raw]
        else:
            arr = np.broadcast_to(np.asarray(raw, dtype=float), (n, 2))
            comps = [arr[:, 0], arr[:, 1]]
        coefficients = np.concatenate(comps)
    else:
        coefficients = np.broadcast_to(np.asarray(raw, dtype=float), (n,)).copy()
    if not np.all(np.isfinite(coefficients)):
        raise AssemblyError("interpolated function is not finite at every dof")
    return Field(space, np.array(coefficients, dtype=float))
