# SPDX-License-Identifier: Apache-2.0
"""Grid and Monte Carlo checks for ergodic control HJB solution pairs."""

from ._ergocheck import (
    ErgocheckError,
    beta_formula,
    beta_quad,
    check_grid_v_rho,
    grid_beta_w_rho,
    grid_nodes,
    models,
    run_pia,
    simulate_average_cost,
    v_rho,
    xi,
)

__all__ = [
    "ErgocheckError",
    "beta_formula",
    "beta_quad",
    "check_grid_v_rho",
    "grid_beta_w_rho",
    "grid_nodes",
    "models",
    "run_pia",
    "simulate_average_cost",
    "v_rho",
    "xi",
]
