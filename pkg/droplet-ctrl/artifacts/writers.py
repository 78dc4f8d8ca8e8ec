"""
Result files.

All tables go through pandas with a fixed float format, so identical runs
produce identical bytes.
"""
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np
import pandas as pd

from control.grid import ControlVector
from fem.mesh import Mesh
from fem.space import Field, FunctionSpace
from models.reports import EnergyReport, OptResult
from utils.errors import ConfigError
from utils.logging import get_logger

logger = get_logger(__name__)

FLOAT_FORMAT = "%.12e"

PathLike = Union[str, Path]


def _prepare(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_table(frame: pd.DataFrame, path: PathLike) -> Path:
    path = _prepare(path)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.debug("Table written", extra={"extra_fields": {"path": str(path), "rows": len(frame)}})
    return path


def write_isolines(polylines: Sequence[np.ndarray], path: PathLike) -> Path:
    """x,y rows, one blank line between polylines."""
    path = _prepare(path)
    with open(path, "w", newline="") as f:
        f.write("x,y\n")
        for k, poly in enumerate(polylines):
            if k:
                f.write("\n")
            pd.DataFrame(np.asarray(poly).reshape(-1, 2), columns=["x", "y"]).to_csv(
                f, index=False, header=False, float_format=FLOAT_FORMAT
            )
    return path


def read_isolines(path: PathLike) -> List[np.ndarray]:
    polylines: List[np.ndarray] = []
    current: List[List[float]] = []
    with open(path) as f:
        next(f)
        for line in f:
            line = line.strip()
            if not line:
                if current:
                    polylines.append(np.array(current))
                current = []
                continue
            current.append([float(v) for v in line.split(",")])
    if current:
        polylines.append(np.array(current))
    return polylines


def write_energy(report: EnergyReport, path: PathLike) -> Path:
    return write_table(report.to_frame(), path)


def control_frame(u: ControlVector) -> pd.DataFrame:
    """One row per coefficient u_rs with its time interval and patch."""
    grid = u.grid
    rows = []
    for r, (t_lo, t_hi) in enumerate(grid.interval_bounds):
        for s, (x_lo, x_hi) in enumerate(grid.patch_bounds):
            rows.append({
                "r": r, "s": s, "t_lo": float(t_lo), "t_hi": float(t_hi),
                "x_lo": float(x_lo), "x_hi": float(x_hi), "value": float(u.matrix[r, s]),
            })
    return pd.DataFrame(rows, columns=["r", "s", "t_lo", "t_hi", "x_lo", "x_hi", "value"])


def write_control(u: ControlVector, path: PathLike) -> Path:
    return write_table(control_frame(u), path)


def read_control(path: PathLike, grid) -> ControlVector:
    frame = pd.read_csv(path).sort_values(["r", "s"])
    if len(frame) != grid.size:
        raise ConfigError(f"{path}: {len(frame)} control rows, grid needs {grid.size}")
    return ControlVector(grid, frame["value"].to_numpy())


def write_iterations(result: OptResult, path: PathLike) -> Path:
    return write_table(result.to_frame(), path)


def write_field(field: Field, path: PathLike) -> Path:
    frame = pd.DataFrame({"dof": np.arange(field.space.dof_count), "value": field.coefficients})
    return write_table(frame, path)


def read_field(path: PathLike, space: FunctionSpace) -> Field:
    """
    Read a dof,value file onto a space.

    Raises:
        ConfigError: If the file is unreadable or does not match the space
    """
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ConfigError(f"cannot read field file {path}: {e}") from e
    if list(frame.columns) != ["dof", "value"]:
        raise ConfigError(f"{path}: expected columns dof,value, got {','.join(map(str, frame.columns))}")
    frame = frame.sort_values("dof")
    if len(frame) != space.dof_count or not np.array_equal(frame["dof"].to_numpy(), np.arange(space.dof_count)):
        raise ConfigError(f"{path}: {len(frame)} dofs, space has {space.dof_count}")
    return Field(space, frame["value"].to_numpy(dtype=float))


def write_mesh(mesh: Mesh, path: PathLike) -> Path:
    """Header 'nodes N triangles T', then N lines x y and T lines i j k."""
    path = _prepare(path)
    with open(path, "w") as f:
        f.write(f"nodes {mesh.n_nodes} triangles {mesh.n_triangles}\n")
        for x, y in mesh.nodes:
            f.write(f"{x:.12e} {y:.12e}\n")
        for i, j, k in mesh.triangles:
            f.write(f"{i} {j} {k}\n")
    return path
