"""
Scenario construction: problem context, initial droplet, control grid and box.
"""
import math
from dataclasses import dataclass

import numpy as np

from control.grid import AdmissibleBox, ControlGrid, ControlVector
from control.operators import project_admissible
from fem.space import Field
from models.scenario import ScenarioConfig
from physics.droplet import initial_droplet
from solver.problem import DropletProblem
from utils.logging import get_logger

logger = get_logger(__name__)

NAIVE_ANGLE_DEG = 135.0


@dataclass
class Scenario:
    config: ScenarioConfig
    problem: DropletProblem
    phi0: Field
    box: AdmissibleBox

    @property
    def grid(self) -> ControlGrid:
        return self.problem.grid

    def initial_control(self) -> ControlVector:
        """Constant control.initial_value, projected onto the box."""
        u = ControlVector.constant(self.grid, self.config.control.initial_value)
        return project_admissible(u, self.box)

    def naive_control(self, angle_deg: float = NAIVE_ANGLE_DEG) -> ControlVector:
        """Bu = cos(angle) - cos(theta_eq) everywhere, projected onto the box."""
        value = math.cos(math.radians(angle_deg)) - self.config.physics.cos_theta_eq
        return project_admissible(ControlVector.constant(self.grid, value), self.box)

    def zero_control(self) -> ControlVector:
        return ControlVector(self.grid, np.zeros(self.grid.size))


def build_scenario(config: ScenarioConfig) -> Scenario:
    """
    Assemble everything a run needs from a validated config.

    Raises:
        ConfigError: If mesh and control grid disagree
    """
    problem = DropletProblem.from_config(config)
    phi0 = initial_droplet(config.droplet.center, config.droplet.radius, config.physics.eps, problem.scalar)
    box = AdmissibleBox(config.control.lo, config.control.hi, config.physics.theta_eq_deg)
    logger.info(
        "Scenario built",
        extra={"extra_fields": {
            **problem.mesh.summary(),
            "steps": problem.n_steps,
            "tau": problem.tau,
            "R": problem.grid.R,
            "S": problem.grid.S,
            "box": [box.lower, box.upper],
        }},
    )
    return Scenario(config=config, problem=problem, phi0=phi0, box=box)
