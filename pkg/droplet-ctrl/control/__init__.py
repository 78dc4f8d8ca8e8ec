"""Control space, control operator and admissible set."""
from .grid import AdmissibleBox, ControlGrid, ControlVector
from .operators import (
    apply_B,
    apply_B_star,
    apply_BstarB,
    boundary_control_values,
    bu_all_steps,
    bu_for_step,
    bu_norm_sq,
    patch_integrals,
    project_admissible,
)

__all__ = [
    "AdmissibleBox",
    "ControlGrid",
    "ControlVector",
    "apply_B",
    "apply_B_star",
    "apply_BstarB",
    "boundary_control_values",
    "bu_all_steps",
    "bu_for_step",
    "bu_norm_sq",
    "patch_integrals",
    "project_admissible",
]
