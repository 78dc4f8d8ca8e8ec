"""Finite element discretization: meshes, spaces, quadrature, assembly and field geometry."""
from .mesh import Mesh, build_rect_mesh
from .space import Field, FunctionSpace, TaylorHoodSpace, interpolate
from .assembly import (
    BoundaryQuadrature,
    assemble_boundary_form,
    assemble_boundary_vector,
    assemble_form,
    assemble_trilinear_a,
    assemble_vector,
    integrate,
    integrate_boundary,
)
from .geometry import centroid_and_contact_angle, zero_isoline

__all__ = [
    "Mesh",
    "build_rect_mesh",
    "Field",
    "FunctionSpace",
    "TaylorHoodSpace",
    "interpolate",
    "BoundaryQuadrature",
    "assemble_boundary_form",
    "assemble_boundary_vector",
    "assemble_form",
    "assemble_trilinear_a",
    "assemble_vector",
    "integrate",
    "integrate_boundary",
    "centroid_and_contact_angle",
    "zero_isoline",
]
