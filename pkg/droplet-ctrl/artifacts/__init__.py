"""Result file writers and readers."""
from .manifest import MANIFEST_NAME, ManifestRecorder
from .writers import (
    control_frame,
    read_control,
    read_field,
    read_isolines,
    write_control,
    write_energy,
    write_field,
    write_isolines,
    write_iterations,
    write_mesh,
    write_table,
)

__all__ = [
    "MANIFEST_NAME",
    "ManifestRecorder",
    "control_frame",
    "read_control",
    "read_field",
    "read_isolines",
    "write_control",
    "write_energy",
    "write_field",
    "write_isolines",
    "write_iterations",
    "write_mesh",
    "write_table",
]
