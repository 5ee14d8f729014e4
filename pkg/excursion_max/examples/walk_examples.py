"""
Ready-made controls, walk configurations and hand-traced score sequences

Attributes:
    analytic_control (EvalControl): Tolerances of the analytic routes to p_c.
    sampling_control (EvalControl): Looser tolerances for the inverse CDF root-finds of the samplers.
    reference_walk_config (WalkConfig): Rademacher walks of 10^4 steps, 2 * 10^5 paths.
    quick_walk_config (WalkConfig): A small Rademacher experiment for smoke runs.
    traced_sequences (dict): Score sequences with their local score statistics traced by hand.
"""

from excursion_max import EvalControl, StepLaw, WalkConfig
from excursion_max.path_engine import SAMPLING_CONTROL

analytic_control = EvalControl(rel_tol=1e-10)

sampling_control = SAMPLING_CONTROL

reference_walk_config = WalkConfig(n=10_000, step_law=StepLaw.RADEMACHER, seed=0, paths=200_000, workers=1)

quick_walk_config = WalkConfig(n=1_000, step_law=StepLaw.RADEMACHER, seed=7, paths=20_000, workers=1)

traced_sequences = {
    # U = (0, 1, 0, 1, 2): the maximum 2 is reached on the final excursion
    "final_excursion_max": {
        "steps": (1.0, -1.0, 1.0, 1.0),
        "u_bar": 2.0,
        "g_n": 2,
        "u_star": 1.0,
        "u_dstar": 2.0,
        "theta_star": 1,
        "complete": False,
    },
    # U = (0, 1, 0): a single complete excursion
    "single_complete": {
        "steps": (1.0, -1.0),
        "u_bar": 1.0,
        "g_n": 2,
        "u_star": 1.0,
        "u_dstar": 0.0,
        "theta_star": 1,
        "complete": True,
    },
    # U = (0, 0, 2, 1, 3, 0, 1): the maximum 3 belongs to the excursion closed at k = 5
    "negative_start": {
        "steps": (-1.0, 2.0, -1.0, 2.0, -4.0, 1.0),
        "u_bar": 3.0,
        "g_n": 5,
        "u_star": 3.0,
        "u_dstar": 1.0,
        "theta_star": 4,
        "complete": True,
    },
    # U = (0, 1, 2, 1, 2): the maximum 2 recurs after the last zero at 0
    "never_returns": {
        "steps": (1.0, 1.0, -1.0, 1.0),
        "u_bar": 2.0,
        "g_n": 0,
        "u_star": 0.0,
        "u_dstar": 2.0,
        "theta_star": 0,
        "complete": False,
    },
}
