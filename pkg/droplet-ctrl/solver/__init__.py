"""Forward, tangent and adjoint solvers of the time-discrete droplet model."""
from .problem import DropletProblem
from .cahn_hilliard import ch_step
from .navier_stokes import ns_step
from .forward import State, Trajectory, mass, simulate, step
from .energy import check_energy_inequality, energy_report
from .adjoint import (
    AdjointState,
    TangentState,
    adjoint_solve,
    adjoint_step,
    reduced_gradient,
    tangent_solve,
    tangent_step,
)
from .gradcheck import fd_gradient_report

__all__ = [
    "DropletProblem",
    "ch_step",
    "ns_step",
    "State",
    "Trajectory",
    "mass",
    "simulate",
    "step",
    "check_energy_inequality",
    "energy_report",
    "AdjointState",
    "TangentState",
    "adjoint_solve",
    "adjoint_step",
    "reduced_gradient",
    "tangent_solve",
    "tangent_step",
    "fd_gradient_report",
]
