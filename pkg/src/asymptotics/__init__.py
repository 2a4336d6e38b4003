from src.asymptotics.first_step import (
    FirstStepSolution,
    alpha_matrix,
    first_step_residual,
    solve_first,
)
from src.asymptotics.initial import (
    analytic_first_init,
    analytic_initializer,
    analytic_second_init,
    rank_one_lambda,
    seed_kappa,
)
from src.asymptotics.newton import NewtonResult, SolverConfig, newton_solve, numerical_jacobian
from src.asymptotics.second_step import (
    SecondStepSolution,
    gamma1_residual,
    joint_residual,
    second_step_residual,
    solve_second,
    solve_second_gamma1,
    tau_of,
)
from src.asymptotics.sweep import point_record, solve_point, sweep_gamma, sweep_snr

__all__ = [
    "FirstStepSolution",
    "NewtonResult",
    "SecondStepSolution",
    "SolverConfig",
    "alpha_matrix",
    "analytic_first_init",
    "analytic_initializer",
    "analytic_second_init",
    "first_step_residual",
    "gamma1_residual",
    "joint_residual",
    "newton_solve",
    "numerical_jacobian",
    "point_record",
    "rank_one_lambda",
    "second_step_residual",
    "seed_kappa",
    "solve_first",
    "solve_point",
    "solve_second",
    "solve_second_gamma1",
    "sweep_gamma",
    "sweep_snr",
    "tau_of",
]
