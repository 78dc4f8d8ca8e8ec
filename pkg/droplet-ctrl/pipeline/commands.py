"""
Subcommand runners.

Each runner writes its artifacts into the output directory, registers them
with the manifest recorder and returns a summary dictionary.
run_subcommand wraps them with error handling and the manifest.
"""
import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

import numpy as np
import pandas as pd

from artifacts.manifest import ManifestRecorder
from artifacts.writers import (
    write_control,
    write_energy,
    write_field,
    write_isolines,
    write_iterations,
    write_mesh,
    write_table,
)
from control.grid import ControlVector
from fem.geometry import DropletGeometry, centroid_and_contact_angle, zero_isoline
from models.scenario import ScenarioConfig
from optimize.kkt import evaluate_variational_inequality
from optimize.objective import ObjectiveValue, QuadraticSurrogate, ReducedObjective
from optimize.projected_gradient import minimize
from solver.adjoint import tangent_adjoint_identity
from solver.energy import energy_report
from solver.forward import Trajectory, mass, simulate
from solver.gradcheck import best_errors, fd_gradient_report, random_directions
from utils.config import get_config
from utils.errors import (
    DropletCtrlError,
    EnergyInequalityViolated,
    EXIT_OK,
    GradientCheckFailed,
    create_error_response,
    exit_code_for,
)
from utils.logging import get_logger
from .desired import desired_source, make_desired_field
from .scenario import Scenario, build_scenario

logger = get_logger(__name__)

Runner = Callable[[Scenario, ManifestRecorder], Dict[str, Any]]


def resolve_output_dir(config: ScenarioConfig, out: Optional[Union[str, Path]] = None) -> Path:
    """--out, then output.directory, then DROPLET_RESULTS_DIR."""
    if out is not None:
        return Path(out)
    if config.output.directory is not None:
        return config.output.directory
    return get_config().RESULTS_DIR


def isoline_times(scenario: Scenario) -> List[float]:
    times = scenario.config.output.isoline_times
    if times is None:
        T = scenario.problem.n_steps * scenario.problem.tau
        times = [float(t) for t in range(int(math.floor(T + 1e-9)) + 1)]
    return times


def _step_at(scenario: Scenario, t: float) -> int:
    m = int(round(t / scenario.problem.tau))
    return min(max(m, 0), scenario.problem.n_steps)


def _geometry(scenario: Scenario, traj: Trajectory, m: int) -> DropletGeometry:
    return centroid_and_contact_angle(traj.states[m].phi, "bottom", scenario.config.physics.eps)


def _centroid_x(scenario: Scenario, traj: Trajectory, m: int) -> Optional[float]:
    geometry = _geometry(scenario, traj, m)
    return None if geometry.centroid is None else float(geometry.centroid[0])


def _comparison_row(scenario: Scenario, name: str, value: ObjectiveValue) -> Dict[str, Any]:
    traj = value.trajectory
    return {
        "control": name,
        "J": value.J,
        "tracking": value.tracking,
        "regularization": value.regularization,
        "centroid_x_final": _centroid_x(scenario, traj, traj.n_steps),
        "contact_angle_gas_deg_final": _geometry(scenario, traj, traj.n_steps).angle,
    }


def _write_trajectory(scenario: Scenario, traj: Trajectory, recorder: ManifestRecorder, prefix: str = "") -> None:
    out = recorder.out_dir
    for t in isoline_times(scenario):
        m = _step_at(scenario, t)
        path = out / f"{prefix}isoline_t{t:.2f}.csv"
        recorder.add_output(write_isolines(zero_isoline(traj.states[m].phi), path))
    if scenario.config.output.dump_fields:
        recorder.add_output(write_mesh(scenario.problem.mesh, out / "mesh.txt"))
        for m, state in enumerate(traj.states):
            recorder.add_output(write_field(state.phi, out / "fields" / f"{prefix}phi_{m:05d}.csv"))


def _trajectory_summary(scenario: Scenario, traj: Trajectory) -> Dict[str, Any]:
    m0 = mass(traj.states[0].phi)
    drift = max(abs(mass(s.phi) - m0) for s in traj.states)
    final = _geometry(scenario, traj, traj.n_steps)
    newton = [r.iterations for r in traj.newton_reports]
    return {
        "steps": traj.n_steps,
        "mass_drift": drift,
        "centroid_x_initial": _centroid_x(scenario, traj, 0),
        "centroid_x_final": None if final.centroid is None else float(final.centroid[0]),
        "contact_angle_gas_deg_final": final.angle,
        "contact_angle_liquid_deg_final": final.liquid_angle,
        "contact_angles_gas_deg_final": [cp.angle for cp in final.contact_points],
        "newton_iterations_max": max(newton) if newton else 0,
    }


def run_simulate(scenario: Scenario, recorder: ManifestRecorder) -> Dict[str, Any]:
    u = scenario.initial_control()
    with recorder.phase("simulate"):
        traj = simulate(scenario.problem, scenario.phi0, u)
    with recorder.phase("write"):
        _write_trajectory(scenario, traj, recorder)
        report = energy_report(scenario.problem, traj)
        recorder.add_output(write_energy(report, recorder.out_dir / "energy.csv"))
    summary = _trajectory_summary(scenario, traj)
    summary["energy_ok"] = report.all_ok
    return summary


def run_energycheck(scenario: Scenario, recorder: ManifestRecorder) -> Dict[str, Any]:
    u = scenario.initial_control()
    with recorder.phase("simulate"):
        traj = simulate(scenario.problem, scenario.phi0, u)
    with recorder.phase("energy"):
        report = energy_report(scenario.problem, traj)
    recorder.add_output(write_energy(report, recorder.out_dir / "energy.csv"))
    violations = report.violations
    if violations:
        raise EnergyInequalityViolated(
            f"energy inequality violated at steps {violations}", steps=violations
        )
    return {"steps": traj.n_steps, "min_slack": min((r.slack for r in report.rows[1:]), default=0.0)}


def run_optimize(scenario: Scenario, recorder: ManifestRecorder) -> Dict[str, Any]:
    config = scenario.config
    problem = scenario.problem
    with recorder.phase("desired"):
        phi_d = make_desired_field(config, problem)
    if config.target.cache_file is not None and config.target.cache_file.is_file():
        recorder.add_output(config.target.cache_file)
    objective = ReducedObjective(problem, scenario.phi0, phi_d, config.alpha_reg)

    with recorder.phase("optimize"):
        result = minimize(objective, scenario.initial_control(), scenario.box, config.optimizer)
    u_opt = ControlVector(scenario.grid, result.u_opt)
    kkt = evaluate_variational_inequality(u_opt, ControlVector(scenario.grid, result.gradient), scenario.box)

    out = recorder.out_dir
    with recorder.phase("write"):
        recorder.add_output(write_iterations(result, out / "iterations.csv"))
        recorder.add_output(write_control(u_opt, out / "control.csv"))
        optimal = objective.evaluate(u_opt)
        _write_trajectory(scenario, optimal.trajectory, recorder, prefix="optimal_")

    rows = [("optimal", optimal)]
    with recorder.phase("compare"):
        for name, u in (("zero", scenario.zero_control()), ("naive", scenario.naive_control())):
            value = objective.evaluate(u)
            rows.append((name, value))
            _write_trajectory(scenario, value.trajectory, recorder, prefix=f"{name}_")
    comparison = pd.DataFrame([_comparison_row(scenario, name, value) for name, value in rows])
    recorder.add_output(write_table(comparison, out / "comparison.csv"))

    return {
        "desired_source": desired_source(config),
        "converged": result.converged,
        "message": result.message,
        "iterations": len(result.history) - 1,
        "J": result.J,
        "J_zero": rows[1][1].J,
        "J_naive": rows[2][1].J,
        "kkt_violation": kkt,
        "forward_solves": objective.forward_solves,
        "centroid_x_final": _centroid_x(scenario, optimal.trajectory, optimal.trajectory.n_steps),
    }


def run_gradcheck(scenario: Scenario, recorder: ManifestRecorder) -> Dict[str, Any]:
    config = scenario.config
    settings = config.gradcheck
    grid = scenario.grid
    directions = random_directions(grid, settings.n_directions, settings.seed)
    # base point off the origin so the regularization gradient is nonzero
    offset = random_directions(grid, 1, settings.seed + 1)[0]
    u = scenario.initial_control() + 0.1 * offset

    summary: Dict[str, Any] = {"surrogate": settings.surrogate}
    if settings.surrogate:
        objective = QuadraticSurrogate(config.alpha_reg)
    else:
        with recorder.phase("desired"):
            phi_d = make_desired_field(config, scenario.problem)
        objective = ReducedObjective(scenario.problem, scenario.phi0, phi_d, config.alpha_reg)

    with recorder.phase("gradient"):
        gradient = objective.gradient(u)
    with recorder.phase("finite_differences"):
        report = fd_gradient_report(objective, u, gradient, directions, settings.epsilons)
    recorder.add_output(write_table(report, recorder.out_dir / "gradcheck.csv"))

    best = best_errors(report)
    summary["best_rel_error"] = {int(k): float(v) for k, v in best.items()}
    summary["max_abs_error"] = float(report["abs_error"].max()) if len(report) else 0.0

    if not settings.surrogate:
        with recorder.phase("identity"):
            traj = objective.evaluate(u).trajectory
            identity = tangent_adjoint_identity(
                scenario.problem, traj, objective.desired, directions[0], config.alpha_reg
            )
        summary["tangent_adjoint"] = identity
    worst = float(np.max(best.to_numpy())) if len(best) else 0.0
    if worst > settings.rel_tol:
        raise GradientCheckFailed(
            f"best relative error {worst:.3e} above {settings.rel_tol:.1e}", summary=summary
        )
    return summary


COMMANDS: Dict[str, Runner] = {
    "simulate": run_simulate,
    "optimize": run_optimize,
    "gradcheck": run_gradcheck,
    "energycheck": run_energycheck,
}


def run_subcommand(name: str, config: ScenarioConfig, out: Optional[Union[str, Path]] = None) -> int:
    """
    Run one subcommand and write its manifest.

    Args:
        name: simulate, optimize, gradcheck or energycheck
        config: Validated scenario config
        out: Output directory override

    Returns:
        Process exit status: 0 ok, 1 solver failure, 2 configuration error,
        3 energy inequality violated, 4 gradient check failed
    """
    if name not in COMMANDS:
        raise ValueError(f"unknown subcommand {name!r}; expected one of {sorted(COMMANDS)}")
    out_dir = resolve_output_dir(config, out)
    recorder = ManifestRecorder(name, config, out_dir)
    logger.info("Run started", extra={"extra_fields": {"command": name, "out": str(out_dir)}})
    try:
        with recorder.phase("setup"):
            scenario = build_scenario(config)
        summary = COMMANDS[name](scenario, recorder)
    except DropletCtrlError as e:
        code = exit_code_for(e)
        error = create_error_response(e)
        logger.error("Run failed", extra={"extra_fields": {"command": name, "exit_code": code, **error}})
        recorder.finish(code, summary=getattr(e, "summary", None), error=error)
        return code
    recorder.finish(EXIT_OK, summary=summary)
    logger.info("Run finished", extra={"extra_fields": {"command": name, **summary}})
    return EXIT_OK
