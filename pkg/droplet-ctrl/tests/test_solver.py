"""
Tests for the forward scheme: Cahn-Hilliard and Navier-Stokes steps,
trajectories and the discrete energy inequality.
"""
import numpy as np
import pytest

from conftest import make_problem
from control.grid import ControlVector
from control.operators import bu_for_step
from fem.space import Field, interpolate
from models.params import PhysicalParams
from models.reports import NewtonReport
from physics.droplet import initial_droplet, pure_phase
from solver.cahn_hilliard import CahnHilliardSystem, ch_step, initial_chemical_potential
from solver.energy import check_energy_inequality, energy_report
from oracles import DenseCahnHilliard, dense_energy_terms
from solver import forward
from solver.forward import State, Trajectory, initial_state, mass, simulate, step
from solver.navier_stokes import ns_step
from utils.errors import ControlError, NewtonDiverged, SimulationError


def droplet(problem, center=(0.4, 0.0), radius=0.2):
    return initial_droplet(center, radius, problem.params.eps, problem.scalar)


def zero_control(problem):
    return ControlVector(problem.grid)


class TestChStep:
    """Tests for the Newton solve of one Cahn-Hilliard step."""

    def test_pure_phase_is_stationary(self, coarse_problem):
        phi_prev = pure_phase(coarse_problem.scalar, -1.0)
        phi, mu, report = ch_step(coarse_problem, phi_prev, coarse_problem.zero_velocity(), np.zeros(2))
        np.testing.assert_allclose(phi.coefficients, -1.0, atol=1e-12)
        np.testing.assert_allclose(mu.coefficients, 0.0, atol=1e-10)
        assert report.converged
        assert report.iterations <= 1

    def test_droplet_step_converges(self, coarse_problem):
        phi_prev = droplet(coarse_problem)
        phi, mu, report = ch_step(coarse_problem, phi_prev, coarse_problem.zero_velocity(), np.zeros(2))
        assert report.converged
        assert report.iterations >= 1
        assert report.final_residual < report.residuals[0]
        assert np.all(np.isfinite(phi.coefficients))
        assert mass(phi) == pytest.approx(mass(phi_prev), abs=1e-8)

    def test_control_changes_the_step(self, coarse_problem):
        phi_prev = droplet(coarse_problem)
        v = coarse_problem.zero_velocity()
        plain, _, _ = ch_step(coarse_problem, phi_prev, v, np.zeros(2))
        wetting, _, _ = ch_step(coarse_problem, phi_prev, v, np.array([-0.5, 0.5]))
        assert np.abs(plain.coefficients - wetting.coefficients).max() > 0.0
        assert mass(wetting) == pytest.approx(mass(phi_prev), abs=1e-8)

    def test_non_finite_residual(self, coarse_problem, mocker):
        n = 2 * coarse_problem.scalar.dof_count
        mocker.patch.object(CahnHilliardSystem, "residual", return_value=np.full(n, np.nan))
        with pytest.raises(NewtonDiverged, match="non-finite"):
            ch_step(coarse_problem, droplet(coarse_problem), coarse_problem.zero_velocity(), np.zeros(2))

    def test_initial_chemical_potential_of_pure_phase(self, coarse_problem):
        mu = initial_chemical_potential(coarse_problem, pure_phase(coarse_problem.scalar, 1.0))
        np.testing.assert_allclose(mu.coefficients, 0.0, atol=1e-10)


class TestDenseCahnHilliard:
    """Cahn-Hilliard steps against a dense Newton solve with closed-form integrals."""

    @pytest.fixture
    def layered(self):
        """Phase depending on y only, at rest, without wetting or control."""
        problem = make_problem(nx=4, ny=2, solver={"newton_rtol": 1e-12})
        y = problem.scalar.dof_coordinates[:, 1]
        return problem, Field(problem.scalar, 0.6 * np.cos(4.0 * np.pi * y))

    def test_ch_step(self, layered):
        problem, phi_prev = layered
        phi_ref, mu_ref = DenseCahnHilliard(problem, phi_prev.coefficients).solve()
        assert np.abs(phi_ref).max() <= 1.0
        phi, mu, report = ch_step(problem, phi_prev, problem.zero_velocity(), np.zeros(problem.grid.S))
        assert report.converged
        np.testing.assert_allclose(phi.coefficients, phi_ref, rtol=0, atol=1e-9)
        np.testing.assert_allclose(mu.coefficients, mu_ref, rtol=0, atol=1e-9 * np.abs(mu_ref).max())

    def test_full_step(self, layered):
        problem, phi_prev = layered
        phi_ref, mu_ref = DenseCahnHilliard(problem, phi_prev.coefficients).solve()
        state = step(problem, initial_state(problem, phi_prev), zero_control(problem), 1)
        np.testing.assert_allclose(state.phi.coefficients, phi_ref, rtol=0, atol=1e-9)
        np.testing.assert_allclose(state.mu.coefficients, mu_ref, rtol=0, atol=1e-9 * np.abs(mu_ref).max())
        assert np.all(np.isfinite(state.v.coefficients))


class TestNsStep:
    """Tests for the Taylor-Hood momentum solve."""

    def test_no_forcing_no_flow(self):
        problem = make_problem(params=PhysicalParams(eps=0.08, tau=0.05, T_end=0.1, g_mag=0.0))
        phi = pure_phase(problem.scalar, -1.0)
        v, p = ns_step(problem, phi, phi, problem.zero_scalar(), problem.zero_velocity())
        np.testing.assert_allclose(v.coefficients, 0.0, atol=1e-12)
        np.testing.assert_allclose(p.coefficients, 0.0, atol=1e-10)

    def test_hydrostatic_balance(self, coarse_problem):
        """Gravity on a pure phase is balanced by the pressure without spurious currents."""
        phi = pure_phase(coarse_problem.scalar, -1.0)
        v, p = ns_step(coarse_problem, phi, phi, coarse_problem.zero_scalar(), coarse_problem.zero_velocity())
        np.testing.assert_allclose(v.coefficients, 0.0, atol=1e-9)
        assert np.ptp(p.coefficients) > 0.0
        assert coarse_problem.ones_integral @ p.coefficients == pytest.approx(0.0, abs=1e-10)

    def test_wall_conditions_and_divergence(self, coarse_problem):
        traj = simulate(coarse_problem, droplet(coarse_problem), zero_control(coarse_problem))
        v = traj.final.v.coefficients
        np.testing.assert_array_equal(v[coarse_problem.dirichlet], 0.0)
        assert np.abs(coarse_problem.D @ v).max() <= 1e-10 * max(1.0, np.abs(v).max())


class TestSimulate:
    """Tests for full trajectories."""

    def test_trajectory_layout(self, coarse_problem, mocker):
        callback = mocker.Mock()
        traj = simulate(coarse_problem, droplet(coarse_problem), zero_control(coarse_problem), on_step=callback)
        assert len(traj) == 3
        assert traj.n_steps == 2
        np.testing.assert_allclose(traj.times, [0.0, 0.05, 0.1])
        assert traj.bu.shape == (2, 2)
        assert len(traj.newton_reports) == 2
        assert [c.args[0] for c in callback.call_args_list] == [1, 2]

    def test_mass_conservation(self, coarse_problem):
        u = ControlVector(coarse_problem.grid, [0.3, -0.3, -0.2, 0.4])
        traj = simulate(coarse_problem, droplet(coarse_problem), u)
        masses = [mass(s.phi) for s in traj.states]
        np.testing.assert_allclose(masses, masses[0], atol=1e-8)

    def test_failure_carries_step(self, coarse_problem, mocker):
        mocker.patch("solver.forward.ch_step", side_effect=NewtonDiverged("no convergence", 30, 1.0))
        with pytest.raises(SimulationError) as info:
            simulate(coarse_problem, droplet(coarse_problem), zero_control(coarse_problem))
        assert info.value.step == 1
        assert isinstance(info.value.cause, NewtonDiverged)

    def test_step_index_checked(self, coarse_problem):
        traj = simulate(coarse_problem, droplet(coarse_problem), zero_control(coarse_problem))
        with pytest.raises(ControlError):
            step(coarse_problem, traj.final, zero_control(coarse_problem), 3)

    def test_single_step_matches_simulate(self, coarse_problem):
        u = ControlVector.constant(coarse_problem.grid, 0.2)
        traj = simulate(coarse_problem, droplet(coarse_problem), u)
        again = step(coarse_problem, traj.states[0], u, 1)
        np.testing.assert_allclose(again.phi.coefficients, traj.states[1].phi.coefficients, atol=1e-14)

    def test_step_uses_only_overlapping_intervals(self, coarse_problem):
        """Step 1 lies in the first control interval; later values do not enter it."""
        prev = initial_state(coarse_problem, droplet(coarse_problem))
        u = ControlVector(coarse_problem.grid, [0.3, -0.2, 0.0, 0.0])
        later = ControlVector(coarse_problem.grid, [0.3, -0.2, 0.8, -0.7])
        tau = coarse_problem.tau
        np.testing.assert_array_equal(bu_for_step(u, 1, tau), bu_for_step(later, 1, tau))

        first = step(coarse_problem, prev, u, 1)
        again = step(coarse_problem, prev, later, 1)
        for name in ("phi", "mu", "v", "p"):
            np.testing.assert_array_equal(getattr(first, name).coefficients, getattr(again, name).coefficients)

        second = step(coarse_problem, first, u, 2)
        moved = step(coarse_problem, first, later, 2)
        assert np.abs(second.phi.coefficients - moved.phi.coefficients).max() > 0.0

    def test_newton_contracts_superlinearly(self):
        """Each step of a run needs several updates and ends with superlinear contraction."""
        params = PhysicalParams(eps=0.08, tau=0.05, T_end=0.1, b=2e-4)
        problem = make_problem(params=params, solver={"newton_rtol": 1e-13})
        traj = simulate(problem, droplet(problem), zero_control(problem))
        assert all(report.converged for report in traj.newton_reports)
        exponents = [report.contraction_exponent for report in traj.newton_reports]
        assert any(e is not None for e in exponents)
        assert all(e >= 1.5 for e in exponents if e is not None)


class TestDecoupling:
    """Order and data flow of the two half steps."""

    def test_cahn_hilliard_first_with_lagged_velocity(self, coarse_problem, mocker):
        ch_spy = mocker.spy(forward, "ch_step")
        ns_spy = mocker.spy(forward, "ns_step")
        prev = initial_state(coarse_problem, droplet(coarse_problem))
        state = step(coarse_problem, prev, zero_control(coarse_problem), 1)

        assert ch_spy.call_count == 1 and ns_spy.call_count == 1
        _, phi_prev, v_prev, _ = ch_spy.call_args.args
        assert phi_prev is prev.phi and v_prev is prev.v
        phi, mu, _ = ch_spy.spy_return
        _, ns_phi, ns_phi_prev, ns_mu, ns_v_prev = ns_spy.call_args.args
        assert ns_phi is phi and ns_mu is mu
        assert ns_phi_prev is prev.phi and ns_v_prev is prev.v
        assert state.phi is phi

    def test_velocity_does_not_enter_its_own_step(self, coarse_problem, mocker):
        prev = initial_state(coarse_problem, droplet(coarse_problem))
        plain = step(coarse_problem, prev, zero_control(coarse_problem), 1)
        bogus = Field(coarse_problem.velocity, np.ones(coarse_problem.velocity.dof_count))
        mocker.patch("solver.forward.ns_step", return_value=(bogus, coarse_problem.zero_scalar()))
        patched = step(coarse_problem, prev, zero_control(coarse_problem), 1)
        np.testing.assert_array_equal(patched.phi.coefficients, plain.phi.coefficients)
        np.testing.assert_array_equal(patched.mu.coefficients, plain.mu.coefficients)
        assert patched.v is bogus

    @pytest.mark.parametrize("value", [-1.0, 1.0])
    def test_pure_phase_at_rest_stays_at_rest(self, value):
        problem = make_problem(params=PhysicalParams(eps=0.08, tau=0.05, T_end=0.1, g_mag=0.0))
        traj = simulate(problem, pure_phase(problem.scalar, value), zero_control(problem))
        for prev, state in zip(traj.states, traj.states[1:]):
            np.testing.assert_allclose(state.phi.coefficients, prev.phi.coefficients, rtol=0, atol=1e-8)
            np.testing.assert_allclose(state.v.coefficients, 0.0, atol=1e-8)


class TestEnergy:
    """Tests for the discrete energy inequality."""

    def test_without_gravity(self):
        problem = make_problem(params=PhysicalParams(eps=0.08, tau=0.05, T_end=0.1, g_mag=0.0))
        traj = simulate(problem, droplet(problem), zero_control(problem))
        report = energy_report(problem, traj)
        assert len(report.rows) == 3
        assert report.all_ok
        assert report.violations == []
        assert report.rows[2].energy <= report.rows[0].energy + 1e-8 * report.scale

    def test_with_gravity_and_control(self, coarse_problem):
        u = ControlVector(coarse_problem.grid, [0.5, -0.5, -0.4, 0.4])
        traj = simulate(coarse_problem, droplet(coarse_problem), u)
        report = energy_report(coarse_problem, traj)
        assert check_energy_inequality(report) == [True, True]
        assert check_energy_inequality(report, cumulative=True) == [True, True]

    def test_report_frame(self, coarse_problem):
        traj = simulate(coarse_problem, droplet(coarse_problem), zero_control(coarse_problem))
        frame = energy_report(coarse_problem, traj).to_frame()
        assert list(frame["step"]) == [0, 1, 2]
        for column in ("kinetic", "bulk", "boundary", "viscous", "slack", "newton_iterations"):
            assert column in frame.columns
        assert frame.loc[0, "kinetic"] == 0.0

    def test_terms_match_dense_quadrature(self):
        """Both sides of the inequality against element-wise quadrature of hand-made states."""
        problem = make_problem(nx=4, ny=2)
        n = problem.mesh.n_nodes
        interior = np.setdiff1d(np.arange(n), problem.mesh.boundary_edges.ravel())

        def phase(wall, inside):
            c = np.full(n, wall)
            c[interior] = inside
            return Field(problem.scalar, c)

        phi0 = phase(-0.7, [0.2, 0.7, -0.1])
        phi1 = phase(-0.8, [0.5, 0.6, 0.3])
        v0 = interpolate(lambda x, y: (y, -x * y), problem.velocity)
        v1 = interpolate(lambda x, y: (x * (1 - x) * y, np.sin(x) * y * (0.5 - y)), problem.velocity)
        mu0 = interpolate(lambda x, y: x - y, problem.scalar)
        mu1 = interpolate(lambda x, y: 3 * x - y ** 2, problem.scalar)
        bu = np.array([[0.3, -0.4]])
        traj = Trajectory(
            states=[
                State(v=v0, p=problem.zero_scalar(), phi=phi0, mu=mu0, t=0.0),
                State(v=v1, p=problem.zero_scalar(), phi=phi1, mu=mu1, t=problem.tau),
            ],
            bu=bu,
        )
        report = energy_report(problem, traj)
        before = dense_energy_terms(problem, phi0, v0, mu0, phi0, bu[0])
        after = dense_energy_terms(problem, phi1, v1, mu1, phi0, bu[0])

        row0, row1 = report.rows
        for name in ("kinetic", "bulk", "boundary"):
            assert getattr(row0, name) == pytest.approx(before[name], rel=1e-10, abs=1e-10)
        for name, value in after.items():
            assert getattr(row1, name) == pytest.approx(value, rel=1e-10, abs=1e-10)
        assert after["relaxation"] > 0.0
        e_prev = before["kinetic"] + before["bulk"] + before["boundary"]
        lhs = sum(after[k] for k in ("kinetic", "bulk", "boundary", "viscous", "mobility",
                                     "stabilization", "relaxation"))
        assert row1.slack == pytest.approx(e_prev + after["gravity_work"] - lhs, rel=1e-10, abs=1e-10)

    def test_violation_detected(self, coarse_problem):
        """A failed row is listed as a violation."""
        traj = simulate(coarse_problem, droplet(coarse_problem), zero_control(coarse_problem))
        report = energy_report(coarse_problem, traj)
        report.rows[1].ok = False
        assert report.violations == [1]
        assert not report.all_ok


class TestNewtonReport:
    def test_contraction_exponent(self):
        report = NewtonReport(iterations=3, residuals=[1e-1, 1e-3, 1e-9, 1e-20], converged=True)
        assert report.contraction_exponent == pytest.approx(3.0)
        assert report.final_residual == 1e-20

    def test_too_few_residuals(self):
        assert NewtonReport(residuals=[0.5, 0.1]).contraction_exponent is None
        assert np.isnan(NewtonReport().final_residual)
