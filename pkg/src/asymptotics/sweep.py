from collections.abc import Callable, Sequence

import numpy as np

from src.asymptotics.first_step import FirstStepSolution, solve_first
from src.asymptotics.initial import analytic_initializer, seed_kappa
from src.asymptotics.newton import SolverConfig
from src.asymptotics.second_step import (
    SecondStepSolution,
    solve_second,
    solve_second_gamma1,
)
from src.constant import FIRST_STEP_FIELDS, SECOND_STEP_FIELDS
from src.exception import ImpossibleRegimeError, NumericError
from src.rtt import FixedPointConfig

Initializer = Callable[[float, float, float, float], tuple[FirstStepSolution, SecondStepSolution]]


def solve_point(
    beta1: float,
    beta2: float,
    alpha: float,
    gamma: float,
    first_init: FirstStepSolution,
    second_init: SecondStepSolution,
    cfg: SolverConfig | None = None,
    fp_cfg: FixedPointConfig | None = None,
) -> tuple[FirstStepSolution, SecondStepSolution]:
    first = solve_first(beta1, beta2, alpha, first_init, cfg)
    if gamma == 1.0:
        second = solve_second_gamma1(beta1, beta2, alpha, first, second_init, cfg)
    else:
        if second_init.kappa == 0.0:
            second_init = seed_kappa(second_init, gamma)
        second = solve_second(beta1, beta2, alpha, gamma, first, second_init, cfg, fp_cfg)
    return first, second


def solution_vector(first: FirstStepSolution, second: SecondStepSolution) -> np.ndarray:
    return np.concatenate([first.as_array(), second.as_array()])


def _status(error: Exception) -> str:
    return "impossible" if isinstance(error, ImpossibleRegimeError) else "failed"


def point_record(
    params: dict,
    first: FirstStepSolution | None,
    second: SecondStepSolution | None,
    status: str = "ok",
    init: str = "",
) -> dict:
    record = dict(params)
    if first is None or second is None:
        record.update({name: float("nan") for name in FIRST_STEP_FIELDS + SECOND_STEP_FIELDS})
        record.update(tau=float("nan"), first_residual=float("nan"), second_residual=float("nan"))
    else:
        record.update(first.to_record())
        record.update(second.to_record())
        record["gamma"] = params["gamma"]
        record.pop("degenerate", None)
    record.update(status=status, init=init)
    return record


def _closest(
    solutions: list[tuple[str, FirstStepSolution, SecondStepSolution]],
    previous: np.ndarray | None,
):
    if previous is None or len(solutions) == 1:
        return solutions[0]
    distances = [
        np.linalg.norm(solution_vector(first, second) - previous)
        for _, first, second in solutions
    ]
    return solutions[int(np.argmin(distances))]


def sweep_snr(
    values: Sequence[float],
    fixed_beta: float,
    alpha: float,
    gamma: float = 1.0,
    vary: str = "beta1",
    initializer: Initializer | None = None,
    cfg: SolverConfig | None = None,
    fp_cfg: FixedPointConfig | None = None,
) -> list[dict]:
    """One SNR sweep line, solved from the largest SNR down by homotopy.

    Each point tries the homotopy seed (previous solution) and, when given, the
    initializer; among the roots found the one closest to the previous point wins.
    """
    if vary not in ("beta1", "beta2"):
        raise ValueError(f"Unknown sweep variable: {vary}")

    rows = []
    previous = None
    for value in sorted(values, reverse=True):
        beta1, beta2 = (value, fixed_beta) if vary == "beta1" else (fixed_beta, value)
        params = dict(beta1=beta1, beta2=beta2, alpha=alpha, gamma=gamma)

        seeds = []
        if previous is not None:
            seeds.append(("homotopy", *previous))
        if initializer is not None:
            try:
                seeds.append(("simulated", *initializer(beta1, beta2, alpha, gamma)))
            except NumericError:
                pass
        if not seeds:
            try:
                seeds.append(("analytic", *analytic_initializer(beta1, beta2, alpha, gamma)))
            except NumericError as e:
                rows.append(point_record(params, None, None, status=_status(e)))
                continue

        solutions = []
        error = None
        for name, first_init, second_init in seeds:
            try:
                solutions.append(
                    (name, *solve_point(beta1, beta2, alpha, gamma, first_init, second_init, cfg, fp_cfg))
                )
            except NumericError as e:
                error = e

        if not solutions:
            rows.append(point_record(params, None, None, status=_status(error)))
            continue

        anchor = None if previous is None else solution_vector(*previous)
        name, first, second = _closest(solutions, anchor)
        previous = (first, second)
        rows.append(point_record(params, first, second, init=name))

    return sorted(rows, key=lambda row: row[vary])


def sweep_gamma(
    beta1: float,
    beta2: float,
    alpha: float,
    gammas: Sequence[float],
    first_init: FirstStepSolution | None = None,
    second_init: SecondStepSolution | None = None,
    cfg: SolverConfig | None = None,
    fp_cfg: FixedPointConfig | None = None,
) -> list[dict]:
    """Second-step asymptotics over a gamma grid, continued downward from gamma = 1."""
    if first_init is None or second_init is None:
        first_init, second_init = analytic_initializer(beta1, beta2, alpha, 1.0)

    first, second = solve_point(beta1, beta2, alpha, 1.0, first_init, second_init, cfg, fp_cfg)
    rows = []
    previous = second
    for gamma in sorted(gammas, reverse=True):
        params = dict(beta1=beta1, beta2=beta2, alpha=alpha, gamma=gamma)
        if gamma == 1.0:
            rows.append(point_record(params, first, second, init="gamma1"))
            continue
        try:
            solution = solve_second(
                beta1, beta2, alpha, gamma, first, seed_kappa(previous, gamma), cfg, fp_cfg
            )
        except NumericError as e:
            rows.append(point_record(params, first, None, status=_status(e)))
            continue
        previous = solution
        rows.append(point_record(params, first, solution, init="homotopy"))

    return sorted(rows, key=lambda row: row["gamma"])
