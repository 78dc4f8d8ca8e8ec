import os

DEFAULT_CONFIG = {
    "version": "1.0.0",
    "project_dir": os.path.abspath(os.path.join(os.path.dirname(__file__), ".")),
    "results_dir": os.getenv("DROPLET_RESULTS_DIR", "./results"),
    # Physical and numerical parameters of the droplet benchmark
    "physics": {
        "sigma_lg": 24.5,
        "rho_l": 1000.0,
        "rho_g": 100.0,
        "eta_l": 10.0,
        "eta_g": 1.0,
        "g_mag": 0.98,
        "incline_deg": -15.0,
        "r": 0.35,
        "eps": 0.02,
        "b": 2e-5,
        "theta_eq_deg": 90.0,
        "tau": 0.1,
        "T_end": 5.0,
        "alpha_reg": 1e-4,
    },
    # Domain (0, 1) x (0, 0.5)
    "mesh": {"nx": 64, "ny": 32, "Lx": 1.0, "Ly": 0.5},
    # Time intervals x bottom patches, bounds on cos(theta_eq) + Bu
    "control": {"R": 5, "S": 10, "lo": -0.9, "hi": 0.9},
    "droplet": {"center": [0.375, 0.0], "radius": 0.25},
    "target": {"center": [0.625, 0.0], "radius": 0.25, "theta_deg": 135.0},
    "boundary": {"left": "no_slip", "right": "no_slip", "bottom": "no_slip", "top": "free_slip"},
    "solver": {
        "newton_rtol": 1e-10,
        "newton_atol": 1e-12,
        "newton_max_iter": 30,
        "max_halvings": 8,
    },
    "optimizer": {
        "max_iters": 30,
        "step0": 1.0,
        "beta": 0.5,
        "armijo_c": 1e-4,
        "grad_tol": 1e-6,
    },
}
