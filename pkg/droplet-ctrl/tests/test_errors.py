"""
Unit tests for error handling.
"""
import pytest
from unittest.mock import patch

from utils.errors import (
    DropletCtrlError,
    ConfigError,
    SolverError,
    NewtonDiverged,
    LinearSolveFailed,
    SimulationError,
    OptimizationError,
    EquilibriumNotReached,
    EnergyInequalityViolated,
    GradientCheckFailed,
    create_error_response,
    exit_code_for,
)


class TestCustomExceptions:
    """Tests for custom exception classes."""

    def test_droplet_ctrl_error(self):
        """Test base DropletCtrlError."""
        error = DropletCtrlError("Test error")
        assert str(error) == "Test error"
        assert isinstance(error, Exception)

    def test_solver_errors(self):
        """Newton and linear failures are solver errors."""
        error = NewtonDiverged("no convergence", iterations=30, residual=1e-3)
        assert isinstance(error, SolverError)
        assert error.iterations == 30
        assert error.residual == 1e-3
        assert isinstance(LinearSolveFailed("singular"), SolverError)

    def test_simulation_error_carries_step(self):
        """SimulationError wraps the solver error with the step index."""
        cause = NewtonDiverged("no convergence")
        error = SimulationError("step failed", step=7, cause=cause)
        assert error.step == 7
        assert error.cause is cause
        assert isinstance(error, DropletCtrlError)
        assert not isinstance(error, SolverError)

    def test_optimization_error_carries_iteration(self):
        """OptimizationError records the iterate index."""
        error = OptimizationError("failed", iteration=3)
        assert error.iteration == 3

    def test_energy_violation_steps(self):
        """EnergyInequalityViolated lists the failing steps."""
        error = EnergyInequalityViolated("violated", steps=[2, 5])
        assert error.steps == [2, 5]
        assert EnergyInequalityViolated("violated").steps == []

    def test_gradient_check_failure_keeps_summary(self):
        """GradientCheckFailed carries the report summary for the manifest."""
        error = GradientCheckFailed("too large", summary={"best_rel_error": {0: 0.5}})
        assert error.summary == {"best_rel_error": {0: 0.5}}
        assert GradientCheckFailed("too large").summary == {}


class TestExitCodes:
    """Tests for exit status mapping."""

    @pytest.mark.parametrize("error,code", [
        (ConfigError("bad"), 2),
        (EnergyInequalityViolated("bad"), 3),
        (SimulationError("bad", step=1), 1),
        (NewtonDiverged("bad"), 1),
        (EquilibriumNotReached("bad"), 1),
        (OptimizationError("bad", iteration=0), 1),
        (GradientCheckFailed("bad"), 4),
    ])
    def test_exit_code_for(self, error, code):
        """Each error class maps to its exit status."""
        assert exit_code_for(error) == code


class TestErrorResponse:
    """Tests for error record creation."""

    def test_create_error_response_development(self):
        """Traceback included when requested."""
        error = ValueError("Test error")
        response = create_error_response(error, include_traceback=True)

        assert response["detail"] == "Test error"
        assert response["error_type"] == "ValueError"
        assert "traceback" in response

    def test_create_error_response_production(self):
        """No traceback outside development."""
        with patch("utils.errors._is_development", return_value=False):
            response = create_error_response(ValueError("Test error"))

        assert "detail" in response
        assert "error_type" in response
        assert "traceback" not in response

    def test_error_response_context(self):
        """Step and iteration indices are part of the record."""
        response = create_error_response(SimulationError("failed", step=4), include_traceback=False)
        assert response["step"] == 4
        response = create_error_response(OptimizationError("failed", iteration=2), include_traceback=False)
        assert response["iteration"] == 2
