"""
Report Models

Solver statistics, energy diagnostics, optimizer results and run manifests.
"""
import math
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

import pandas as pd
from pydantic import BaseModel, Field


class NewtonReport(BaseModel):
    """Convergence record of one Cahn-Hilliard Newton solve."""

    iterations: int = Field(0, description="Newton updates performed")
    residuals: List[float] = Field(default_factory=list, description="Residual norm before each update and at the end")
    damping_steps: int = Field(0, description="Total step halvings")
    converged: bool = False

    @property
    def final_residual(self) -> float:
        return self.residuals[-1] if self.residuals else float("nan")

    @property
    def contraction_exponent(self) -> Optional[float]:
        """
        log(r_k) / log(r_(k-1)) over the last two updates before convergence.

        Values above 1 indicate superlinear contraction; None when fewer
        than three residuals are positive and below one.
        """
        r = [x for x in self.residuals if 0.0 < x < 1.0]
        if len(r) < 3:
            return None
        a, b = r[-2], r[-3]
        if a >= b:
            return None
        return math.log(a) / math.log(b)


class EnergyStep(BaseModel):
    """Both sides of the discrete energy inequality at one step."""

    step: int
    t: float
    kinetic: float = Field(..., description="1/2 int rho |v|^2")
    bulk: float = Field(..., description="sigma int eps/2 |grad phi|^2 + W(phi)/eps")
    boundary: float = Field(..., description="int gamma_u(phi) over the wetting boundary")
    energy: float = Field(..., description="kinetic + bulk + boundary")
    viscous: float = Field(0.0, description="tau int 2 eta |Dv|^2")
    mobility: float = Field(0.0, description="tau int b |grad mu|^2")
    stabilization: float = Field(0.0, description="tau^2/rho_min int |phi'|^2 |grad mu|^2")
    relaxation: float = Field(0.0, description="tau r int |B^m|^2")
    gravity_work: float = Field(0.0, description="tau int rho g . v")
    newton_iterations: int = 0
    newton_residual: float = 0.0
    newton_damping: int = 0
    contraction: Optional[float] = None
    slack: float = Field(0.0, description="rhs - lhs of the per-step inequality")
    cumulative_slack: float = Field(0.0, description="rhs - lhs of the summed inequality")
    ok: bool = True
    cumulative_ok: bool = True


class EnergyReport(BaseModel):
    rows: List[EnergyStep] = Field(default_factory=list)
    rtol: float = 1e-8
    scale: float = 1.0

    @property
    def all_ok(self) -> bool:
        return all(row.ok and row.cumulative_ok for row in self.rows)

    @property
    def violations(self) -> List[int]:
        return [row.step for row in self.rows if not (row.ok and row.cumulative_ok)]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.model_dump() for row in self.rows])


class IterationRecord(BaseModel):
    iter: int
    J: float
    tracking: float
    regularization: float
    stationarity: float
    step: float = Field(0.0, description="Accepted step length; 0 for the starting point")
    forward_solves: int = Field(0, description="Forward simulations used by this iteration")


class OptResult(BaseModel):
    """Outcome of the projected-gradient optimizer."""

    u_opt: List[float]
    J: float
    history: List[IterationRecord] = Field(default_factory=list)
    converged: bool = False
    message: str = ""
    gradient: Optional[List[float]] = None

    @property
    def J_history(self) -> List[float]:
        return [rec.J for rec in self.history]

    @property
    def forward_solves(self) -> int:
        return sum(rec.forward_solves for rec in self.history)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([rec.model_dump() for rec in self.history])


class RunManifest(BaseModel):
    """Record of one CLI invocation, written once at the end of the run."""

    command: str
    config: Dict[str, Any]
    code_version: str
    started_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    phases: Dict[str, float] = Field(default_factory=dict, description="Wall-clock seconds per phase")
    outputs: List[str] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)
    status: str = "running"
    exit_code: Optional[int] = None
    error: Optional[Dict[str, Any]] = None
