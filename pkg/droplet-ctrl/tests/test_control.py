"""
Unit tests for the control grid, the control operator and the admissible box.
"""
import numpy as np
import pytest

from control.grid import AdmissibleBox, ControlGrid, ControlVector
from control.operators import (
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
from utils.errors import ControlError


def single_entry(grid, r, s, value=1.0):
    coeffs = np.zeros(grid.size)
    coeffs[r * grid.S + s] = value
    return ControlVector(grid, coeffs)


class TestControlGrid:
    """Tests for the interval x patch partition."""

    def test_bounds_partition(self, unit_grid):
        intervals = unit_grid.interval_bounds
        patches = unit_grid.patch_bounds
        assert intervals.shape == (5, 2)
        assert patches.shape == (10, 2)
        np.testing.assert_allclose(intervals[1:, 0], intervals[:-1, 1])
        assert patches[0, 0] == 0.0
        assert patches[-1, 1] == pytest.approx(1.0)
        np.testing.assert_allclose(unit_grid.cell_measures, 0.1)

    def test_tie_breaks(self, unit_grid):
        """Patches are [left, right), intervals are (left, right]."""
        assert unit_grid.patch_index(0.3) == 3
        assert unit_grid.patch_index(1.0) == 9
        assert unit_grid.interval_index(2.0) == 1
        assert unit_grid.interval_index(0.0) == 0
        assert unit_grid.interval_index(5.0) == 4

    def test_overlaps_sum_to_tau(self, unit_grid):
        ov = unit_grid.overlaps(0.3, 16)
        assert ov.shape == (16, 5)
        np.testing.assert_allclose(ov.sum(axis=1), 0.3, atol=1e-14)
        # step (0.9, 1.2] straddles the first interval boundary
        np.testing.assert_allclose(ov[3, :2], [0.1, 0.2], atol=1e-14)

    @pytest.mark.parametrize("R,S", [(1, 4), (4, 1)])
    def test_degenerate_grids(self, R, S):
        """Space-only and time-only controls are valid grids."""
        grid = ControlGrid(R, S, T=2.0)
        assert grid.size == 4
        assert grid.breakpoints.size == S - 1

    @pytest.mark.parametrize("kwargs", [
        {"R": 0, "S": 2, "T": 1.0},
        {"R": 2, "S": 1.5, "T": 1.0},
        {"R": 2, "S": 2, "T": 0.0},
        {"R": 2, "S": 2, "T": 1.0, "Lx": -1.0},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ControlError):
            ControlGrid(**kwargs)

    def test_equality(self, unit_grid):
        assert unit_grid == ControlGrid(5, 10, 5.0, 1.0)
        assert unit_grid != ControlGrid(5, 9, 5.0, 1.0)


class TestControlVector:
    """Tests for value semantics and validation."""

    def test_wrong_size(self, unit_grid):
        with pytest.raises(ControlError, match="50"):
            ControlVector(unit_grid, np.zeros(49))

    def test_non_finite(self, unit_grid):
        coeffs = np.zeros(50)
        coeffs[7] = np.nan
        with pytest.raises(ControlError, match="finite"):
            ControlVector(unit_grid, coeffs)

    def test_read_only(self, unit_grid):
        u = ControlVector.constant(unit_grid, 0.2)
        with pytest.raises(ValueError):
            u.coefficients[0] = 1.0

    def test_arithmetic(self, unit_grid):
        u = ControlVector.constant(unit_grid, 0.5)
        w = single_entry(unit_grid, 1, 2)
        assert (u + w).matrix[1, 2] == pytest.approx(1.5)
        assert (2 * u - w).matrix[1, 2] == pytest.approx(0.0)
        assert u.dot(w) == pytest.approx(0.5)
        assert u.coefficients[0] == 0.5


class TestApplyB:
    """Tests for pointwise Bu and its step averages."""

    def test_single_entry(self, unit_grid):
        u = single_entry(unit_grid, 2, 3)
        assert apply_B(u, 2.5, 0.35, 0.0) == 1.0
        assert apply_B(u, 2.5, 0.3, 0.0) == 1.0
        assert apply_B(u, 3.5, 0.35, 0.0) == 0.0
        assert apply_B(u, 2.5, 0.45, 0.0) == 0.0

    def test_off_wall_is_zero(self, unit_grid):
        u = ControlVector.constant(unit_grid, 0.7)
        pts = np.array([[0.5, 0.0], [0.5, 0.1], [1.5, 0.0]])
        np.testing.assert_array_equal(apply_B(u, 1.0, pts), [0.7, 0.0, 0.0])

    def test_step_inside_interval(self, unit_grid):
        rng = np.random.default_rng(3)
        u = ControlVector(unit_grid, rng.normal(size=50))
        np.testing.assert_allclose(bu_for_step(u, 3, 0.5), u.matrix[1], atol=1e-14)

    def test_step_straddling_intervals(self):
        grid = ControlGrid(2, 3, T=1.0)
        u = ControlVector(grid, np.arange(6.0))
        # tau = 0.25 with T/R = 0.5: step 2 is (0.25, 0.5], step 3 (0.5, 0.75]
        np.testing.assert_allclose(bu_for_step(u, 2, 0.25), u.matrix[0])
        tau = 1.0 / 3.0
        # step 2 is (1/3, 2/3], one half in each interval
        np.testing.assert_allclose(bu_for_step(u, 2, tau), 0.5 * (u.matrix[0] + u.matrix[1]), atol=1e-14)

    def test_constant_control(self, unit_grid):
        u = ControlVector.constant(unit_grid, -0.4)
        np.testing.assert_allclose(bu_all_steps(u, 0.1, 50), -0.4, atol=1e-14)

    def test_step_range(self, unit_grid):
        u = ControlVector(unit_grid)
        with pytest.raises(ControlError):
            bu_for_step(u, 0, 0.1)
        with pytest.raises(ControlError):
            bu_for_step(u, 51, 0.1, n_steps=50)

    def test_quadrature_matches_step_average(self, unit_grid):
        """Time quadrature of pointwise Bu reproduces B_m u."""
        rng = np.random.default_rng(5)
        u = ControlVector(unit_grid, rng.normal(size=50))
        tau, m = 0.3, 4
        t = np.linspace((m - 1) * tau, m * tau, 30001)[1:]
        x = 0.55
        average = np.mean(apply_B(u, t, np.full_like(t, x), np.zeros_like(t)))
        assert average == pytest.approx(bu_for_step(u, m, tau)[5], abs=1e-3)

    def test_boundary_values(self, unit_grid):
        u = single_entry(unit_grid, 0, 1, 2.0)
        bu = bu_for_step(u, 1, 0.5)
        points = np.array([[[0.15, 0.0], [0.25, 0.0]], [[0.15, 0.2], [0.15, 0.3]]])
        values = boundary_control_values(unit_grid, bu, points, np.array([True, False]))
        np.testing.assert_array_equal(values, [[2.0, 0.0], [0.0, 0.0]])


class TestApplyBStar:
    """Tests for the adjoint of B."""

    def test_constant_data(self, unit_grid):
        tau = 0.1
        q = np.full((50, 10), 0.1)
        g = apply_B_star(unit_grid, q, tau)
        np.testing.assert_allclose(g.coefficients, 0.1, atol=1e-13)

    def test_adjoint_identity(self, unit_grid):
        """<B u, q> = <u, B* q> with q given per step and patch."""
        rng = np.random.default_rng(11)
        tau, M = 0.25, 20
        u = ControlVector(unit_grid, rng.normal(size=50))
        q = rng.normal(size=(M, 10))
        lhs = tau * np.sum(bu_all_steps(u, tau, M) * q)
        rhs = u.dot(apply_B_star(unit_grid, q, tau))
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_localized_data(self, unit_grid):
        q = np.zeros((50, 10))
        q[12, 4] = 1.0
        g = apply_B_star(unit_grid, q, 0.1)
        assert np.count_nonzero(g.coefficients) == 1
        assert g.matrix[1, 4] == pytest.approx(0.1)

    def test_patch_columns_checked(self, unit_grid):
        with pytest.raises(ControlError):
            apply_B_star(unit_grid, np.zeros((3, 4)), 0.1)

    def test_patch_integrals(self, unit_grid):
        midpoints = np.array([[0.05, 0.0], [0.07, 0.0], [0.95, 0.0]])
        np.testing.assert_allclose(
            patch_integrals(unit_grid, np.array([1.0, 2.0, 4.0]), midpoints),
            [3.0] + [0.0] * 8 + [4.0],
        )


class TestAdmissible:
    """Tests for the box and its projection."""

    def test_bounds(self):
        box = AdmissibleBox(-0.9, 0.9, 90.0)
        assert box.lower == pytest.approx(-0.9)
        assert box.upper == pytest.approx(0.9)
        shifted = AdmissibleBox(-0.9, 0.9, 60.0)
        assert shifted.upper == pytest.approx(0.4)

    def test_invalid_box(self):
        with pytest.raises(ControlError):
            AdmissibleBox(0.5, 0.5, 90.0)

    def test_projection_clamps(self, unit_grid):
        box = AdmissibleBox(-0.9, 0.9, 90.0)
        u = single_entry(unit_grid, 0, 0, 1.2)
        p = project_admissible(u, box)
        assert p.coefficients[0] == pytest.approx(0.9)
        assert box.contains(p)
        assert not box.contains(u)

    def test_projection_properties(self, unit_grid):
        """Idempotent and non-expansive."""
        box = AdmissibleBox(-0.9, 0.9, 90.0)
        rng = np.random.default_rng(2)
        for _ in range(5):
            u = ControlVector(unit_grid, 2 * rng.normal(size=50))
            w = ControlVector(unit_grid, 2 * rng.normal(size=50))
            pu, pw = project_admissible(u, box), project_admissible(w, box)
            np.testing.assert_array_equal(project_admissible(pu, box).coefficients, pu.coefficients)
            assert np.linalg.norm((pu - pw).coefficients) <= np.linalg.norm((u - w).coefficients) + 1e-14

    def test_feasible_cosine_stays_inside_unit_interval(self, unit_grid):
        box = AdmissibleBox(-0.9, 0.9, 70.0)
        u = project_admissible(ControlVector(unit_grid, np.linspace(-3, 3, 50)), box)
        assert np.all(np.abs(box.cos_theta_eq + u.coefficients) <= 0.9 + 1e-14)


class TestNorms:
    """Tests for ||Bu||^2 and B*B."""

    def test_single_entry(self, unit_grid):
        assert bu_norm_sq(single_entry(unit_grid, 3, 7, 2.0)) == pytest.approx(0.4)

    def test_zero_and_scaling(self, unit_grid):
        rng = np.random.default_rng(4)
        u = ControlVector(unit_grid, rng.normal(size=50))
        assert bu_norm_sq(ControlVector(unit_grid)) == 0.0
        assert bu_norm_sq(3.0 * u) == pytest.approx(9.0 * bu_norm_sq(u))

    def test_BstarB_consistent_with_norm(self, unit_grid):
        rng = np.random.default_rng(6)
        u = ControlVector(unit_grid, rng.normal(size=50))
        assert u.dot(apply_BstarB(u)) == pytest.approx(bu_norm_sq(u))
