from src.rtt.density import (
    DensityTable,
    nu_cdf,
    nu_density,
    stieltjes_on_grid,
    support_edges,
    support_right_edge,
)
from src.rtt.fixed_point import (
    FixedPointConfig,
    StieltjesState,
    check_tau,
    fixed_point_residuals,
    initial_guess,
    newton_step,
    stieltjes_fixed_point,
)
from src.rtt.semicircle import (
    f_r,
    h_r,
    r_real,
    r_semicircle,
    semicircle_cdf,
    semicircle_density,
)

__all__ = [
    "DensityTable",
    "FixedPointConfig",
    "StieltjesState",
    "check_tau",
    "f_r",
    "fixed_point_residuals",
    "h_r",
    "initial_guess",
    "newton_step",
    "nu_cdf",
    "nu_density",
    "r_real",
    "r_semicircle",
    "semicircle_cdf",
    "semicircle_density",
    "stieltjes_fixed_point",
    "stieltjes_on_grid",
    "support_edges",
    "support_right_edge",
]
