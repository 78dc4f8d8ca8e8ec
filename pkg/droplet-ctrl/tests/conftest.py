"""
Pytest configuration and fixtures for droplet-ctrl tests.
"""
import sys
from pathlib import Path

import pytest

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from control.grid import ControlGrid  # noqa: E402
from fem.mesh import build_rect_mesh  # noqa: E402
from fem.space import FunctionSpace  # noqa: E402
from models.params import PhysicalParams  # noqa: E402
from models.scenario import parse_config  # noqa: E402
from solver.problem import DropletProblem  # noqa: E402


@pytest.fixture(autouse=True)
def mock_config(monkeypatch):
    """Testing environment, no progress bars (auto-use for all tests)."""
    monkeypatch.setenv("LOG_LEVEL", "DEBUG")
    monkeypatch.setenv("ENVIRONMENT", "testing")
    monkeypatch.setenv("DROPLET_PROGRESS", "0")
    monkeypatch.delenv("LOG_FILE", raising=False)

    from utils.config import get_config, reset_config
    reset_config()
    yield get_config()
    reset_config()


@pytest.fixture
def tiny_mesh():
    """2 x 1 cells on (0, 1) x (0, 0.5): 6 nodes, 4 triangles."""
    return build_rect_mesh(2, 1, 1.0, 0.5)


@pytest.fixture
def small_mesh():
    return build_rect_mesh(8, 4, 1.0, 0.5)


@pytest.fixture
def p1_space(small_mesh):
    return FunctionSpace(small_mesh, "P1")


@pytest.fixture
def default_params():
    return PhysicalParams()


@pytest.fixture
def coarse_params():
    """Short horizon with a wide interface, resolvable on coarse meshes."""
    return PhysicalParams(eps=0.08, tau=0.05, T_end=0.1)


def make_problem(nx=8, ny=4, params=None, R=2, S=2, boundary=None, solver=None):
    """Problem context on (0, 1) x (0, 0.5) for a short run."""
    params = params or PhysicalParams(eps=0.08, tau=0.05, T_end=0.1)
    data = {
        "mesh": {"nx": nx, "ny": ny},
        "physics": params.model_dump(),
        "control": {"R": R, "S": S},
    }
    if boundary:
        data["boundary"] = boundary
    if solver:
        data["solver"] = solver
    config = parse_config(data)
    return DropletProblem.from_config(config)


@pytest.fixture
def coarse_problem():
    return make_problem()


@pytest.fixture
def coarse_config_data():
    """Scenario dictionary of a run that finishes in seconds."""
    return {
        "mesh": {"nx": 8, "ny": 4},
        "physics": {"eps": 0.08, "tau": 0.05, "T_end": 0.1},
        "control": {"R": 2, "S": 2},
        "droplet": {"center": [0.4, 0.0], "radius": 0.2},
        "target": {"center": [0.6, 0.0], "radius": 0.2, "equilibrate": False},
        "optimizer": {"max_iters": 2},
        "gradcheck": {"epsilons": [1e-3, 1e-4], "n_directions": 1},
    }


@pytest.fixture
def unit_grid():
    return ControlGrid(R=5, S=10, T=5.0, Lx=1.0)
