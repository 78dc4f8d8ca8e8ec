"""Reduced objective, projected gradient optimizer and optimality check."""
from .kkt import evaluate_variational_inequality, kkt_violations
from .objective import (
    DesiredState,
    ObjectiveValue,
    QuadraticSurrogate,
    ReducedObjective,
    desired_steps,
    reduced_objective,
)
from .projected_gradient import minimize, optimize, stationarity

__all__ = [
    "evaluate_variational_inequality",
    "kkt_violations",
    "DesiredState",
    "ObjectiveValue",
    "QuadraticSurrogate",
    "ReducedObjective",
    "desired_steps",
    "reduced_objective",
    "minimize",
    "optimize",
    "stationarity",
]
