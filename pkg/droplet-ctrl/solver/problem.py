"""
Discrete problem context: spaces, constant matrices, boundary quadrature
and velocity boundary conditions shared by the forward, tangent and adjoint
solvers.
"""
from typing import Dict, Optional

import numpy as np
import scipy.sparse as sp

from control.grid import ControlGrid
from control.operators import boundary_control_values
from fem.assembly import (
    BoundaryQuadrature,
    assemble_boundary_form,
    assemble_form,
    divergence_kernel,
    mass_kernel,
    stiffness_kernel,
)
from fem.mesh import Mesh, build_rect_mesh
from fem.space import Field, TaylorHoodSpace
from models.params import PhysicalParams
from models.scenario import BoundaryConfig, ScenarioConfig, SolverConfig
from physics.material import gravity_vector
from utils.errors import ConfigError
from utils.logging import get_logger

logger = get_logger(__name__)

# Velocity component normal to each wall
_NORMAL_COMPONENT: Dict[str, int] = {"bottom": 1, "top": 1, "left": 0, "right": 0}


class DropletProblem:
    """
    Everything about a scenario that does not change between time steps.

    Attributes:
        mesh: Triangulation
        params: Physical parameters
        grid: Control grid
        taylor_hood: Velocity/pressure spaces
        velocity: P2 vector space
        scalar: P1 space of phi, mu and the pressure
        M, K: P1 mass and stiffness matrices
        M_b: P1 boundary mass on the wetting boundary
        D: Divergence matrix (P1 rows, velocity columns)
        ones_integral: int Psi_i dx, the pressure mean functional
        quadrature: Wetting boundary quadrature (whole boundary, split at
            the patch boundaries)
        on_bottom: (segments,) mask of controlled segments
        free: Free velocity dofs
        gravity: Gravity vector
    """

    def __init__(
        self,
        mesh: Mesh,
        params: PhysicalParams,
        grid: ControlGrid,
        boundary: Optional[BoundaryConfig] = None,
        solver: Optional[SolverConfig] = None,
    ):
        self.mesh = mesh
        self.params = params
        self.grid = grid
        self.boundary = boundary or BoundaryConfig()
        self.solver = solver or SolverConfig()
        self.degree = self.solver.degree

        if abs(grid.Lx - mesh.Lx) > 1e-12 * mesh.Lx:
            raise ConfigError(f"control grid length {grid.Lx} differs from the mesh width {mesh.Lx}")

        self.taylor_hood = TaylorHoodSpace(mesh)
        self.velocity = self.taylor_hood.velocity
        self.scalar = self.taylor_hood.pressure

        deg = self.degree
        self.M = assemble_form(self.scalar, self.scalar, mass_kernel(), degree=deg)
        self.K = assemble_form(self.scalar, self.scalar, stiffness_kernel(), degree=deg)
        self.D = assemble_form(self.velocity, self.scalar, divergence_kernel, degree=deg)
        self.ones_integral = np.asarray(self.M.sum(axis=1)).ravel()

        self.quadrature = BoundaryQuadrature(
            mesh, mesh.tags, n_points=self.solver.boundary_points, breakpoints=grid.breakpoints
        )
        self.on_bottom = self.quadrature.tags == "bottom"
        self.M_b = assemble_boundary_form(
            self.scalar, self.scalar, mass_kernel(), quadrature=self.quadrature
        )

        self.dirichlet = self._dirichlet_dofs()
        mask = np.ones(self.velocity.dof_count, dtype=bool)
        mask[self.dirichlet] = False
        self.free = np.flatnonzero(mask)
        self.gravity = gravity_vector(params)

        logger.debug(
            "Problem assembled",
            extra={"extra_fields": {
                **mesh.summary(),
                "velocity_dofs": self.velocity.dof_count,
                "free_velocity_dofs": int(self.free.size),
                "scalar_dofs": self.scalar.dof_count,
                "boundary_segments": self.quadrature.n_segments,
            }},
        )

    @classmethod
    def from_config(cls, config: ScenarioConfig, params: Optional[PhysicalParams] = None) -> "DropletProblem":
        params = params or config.physics
        mesh = build_rect_mesh(config.mesh.nx, config.mesh.ny, config.mesh.Lx, config.mesh.Ly)
        grid = ControlGrid(config.control.R, config.control.S, max(params.T_end, params.tau), config.mesh.Lx)
        return cls(mesh, params, grid, config.boundary, config.solver)

    def with_params(self, params: PhysicalParams) -> "DropletProblem":
        """Same discretization, other physical parameters."""
        return DropletProblem(self.mesh, params, self.grid, self.boundary, self.solver)

    def _dirichlet_dofs(self) -> np.ndarray:
        dofs = []
        for tag in self.mesh.tags:
            condition = getattr(self.boundary, tag)
            component = None if condition == "no_slip" else _NORMAL_COMPONENT[tag]
            dofs.append(self.velocity.boundary_dofs(tag, component))
        return np.unique(np.concatenate(dofs)) if dofs else np.array([], dtype=np.int64)

    @property
    def n_steps(self) -> int:
        return self.params.n_steps

    @property
    def tau(self) -> float:
        return self.params.tau

    def bu_at_quadrature(self, bu_patch: np.ndarray) -> np.ndarray:
        """Bu of one step at the wetting quadrature points (zero off the bottom)."""
        return boundary_control_values(self.grid, bu_patch, self.quadrature.points, self.on_bottom)

    def zero_scalar(self) -> Field:
        return Field(self.scalar)

    def zero_velocity(self) -> Field:
        return Field(self.velocity)

    def restrict(self, matrix: sp.spmatrix, rows: bool = True, cols: bool = False) -> sp.csr_matrix:
        """Select free velocity rows and/or columns."""
        matrix = sp.csr_matrix(matrix)
        if rows:
            matrix = matrix[self.free, :]
        if cols:
            matrix = sp.csc_matrix(matrix)[:, self.free]
        return sp.csr_matrix(matrix)

    def extend_velocity(self, free_values: np.ndarray) -> np.ndarray:
        out = np.zeros(self.velocity.dof_count)
        out[self.free] = free_values
        return out

    def __repr__(self) -> str:
        return (
            f"DropletProblem(nodes={self.mesh.n_nodes}, triangles={self.mesh.n_triangles}, "
            f"steps={self.n_steps}, grid={self.grid})"
        )
