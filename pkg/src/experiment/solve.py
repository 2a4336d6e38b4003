import itertools
from functools import partial
from pathlib import Path

import polars as pl

from src.asymptotics import SolverConfig, sweep_gamma, sweep_snr
from src.config import SolveConfig, grid_values
from src.exception import NumericError
from src.experiment.deflation import SUMMARY_COLUMNS, deflate_trial
from src.experiment.runner import (
    JobOutput,
    Solvers,
    fan_out,
    frame_from_rows,
    log_failures,
    make_solvers,
    summarize,
)
from src.io_util import write_frame
from src.logger import BaseLogger
from src.pipeline import simulated_initializer
from src.proc_util import trace
from src.random_util import trial_seed
from src.rank_one import PowerIterConfig
from src.rtt import FixedPointConfig

KEYS = ["beta1", "beta2", "alpha", "gamma"]


def solve_line(
    line: dict,
    cfg: SolveConfig,
    power_cfg: PowerIterConfig,
    newton_cfg: SolverConfig,
    fp_cfg: FixedPointConfig,
) -> list[dict]:
    """One asymptotic sweep line (an SNR line at fixed gamma, or a gamma line)."""
    alpha = line["alpha"]
    simulated = partial(simulated_initializer, p=cfg.sim_p, seed=cfg.seed, cfg=power_cfg)
    if cfg.mode == "snr":
        return sweep_snr(
            grid_values(cfg.snr),
            cfg.fixed_beta,
            alpha,
            gamma=line["gamma"],
            vary=cfg.vary,
            initializer=simulated if cfg.initializer == "simulated" else None,
            cfg=newton_cfg,
            fp_cfg=fp_cfg,
        )

    first_init = second_init = None
    if cfg.initializer == "simulated":
        try:
            first_init, second_init = simulated(cfg.beta1, cfg.beta2, alpha, 1.0)
        except NumericError:
            pass
    return sweep_gamma(
        cfg.beta1,
        cfg.beta2,
        alpha,
        grid_values(cfg.gamma),
        first_init,
        second_init,
        cfg=newton_cfg,
        fp_cfg=fp_cfg,
    )


def _points(cfg: SolveConfig) -> list[tuple[float, float, float, float]]:
    if cfg.mode == "gamma":
        return [
            (cfg.beta1, cfg.beta2, alpha, gamma)
            for alpha, gamma in itertools.product(cfg.alpha, grid_values(cfg.gamma))
        ]
    points = []
    for value, alpha, gamma in itertools.product(grid_values(cfg.snr), cfg.alpha, grid_values(cfg.gamma)):
        beta1, beta2 = (value, cfg.fixed_beta) if cfg.vary == "beta1" else (cfg.fixed_beta, value)
        points.append((beta1, beta2, alpha, gamma))
    return points


def _simulate(cfg: SolveConfig, solvers: Solvers, logger: BaseLogger) -> tuple[pl.DataFrame, list[int]]:
    tasks = [
        dict(beta1=beta1, beta2=beta2, alpha=alpha, gamma=gamma, trial=trial, seed=trial_seed(cfg.seed, trial))
        for (beta1, beta2, alpha, gamma), trial in itertools.product(_points(cfg), range(cfg.num_trials))
    ]
    results = fan_out(
        partial(_simulate_point, p=cfg.sim_p, power_cfg=solvers.power),
        tasks,
        cfg.env.num_workers,
        desc="simulate",
    )
    rows = log_failures([row for rows in results for row in rows], logger, KEYS + ["trial"])
    return frame_from_rows(rows).sort(KEYS + ["trial"]), sorted({t["seed"] for t in tasks})


def _simulate_point(task: dict, p: int, power_cfg: PowerIterConfig) -> list[dict]:
    return deflate_trial(task, p=p, gammas=[task["gamma"]], noiseless=False, power_cfg=power_cfg)


def run_solve(cfg: SolveConfig, out_dir: Path, logger: BaseLogger) -> JobOutput:
    """Asymptotic sweep lines, optionally compared against simulated alignments."""
    solvers = make_solvers(cfg.solver)
    if cfg.mode == "snr":
        lines = [dict(alpha=a, gamma=g) for a, g in itertools.product(cfg.alpha, grid_values(cfg.gamma))]
    else:
        lines = [dict(alpha=a) for a in cfg.alpha]
    print(f"[INFO] solve: {len(lines)} sweep lines ({cfg.mode} mode)")

    line_fn = partial(
        solve_line,
        cfg=cfg,
        power_cfg=solvers.power,
        newton_cfg=solvers.newton,
        fp_cfg=solvers.fixed_point,
    )
    with trace("asymptotic sweeps"):
        results = fan_out(line_fn, lines, cfg.env.num_workers, desc="solve")
    rows = [row for rows in results for row in rows]
    for row in rows:
        if row["status"] != "ok":
            logger.write_event("point", status=row["status"], **{k: row[k] for k in KEYS})

    asymptotics = (
        frame_from_rows(rows)
        .with_columns(
            pl.max_horizontal(pl.col("theta21").abs(), pl.col("theta22").abs()).alias("theta2_max"),
            pl.max_horizontal(pl.col("rho21").abs(), pl.col("rho22").abs()).alias("rho2_max"),
        )
        .sort(KEYS)
    )
    files = [write_frame(asymptotics, out_dir / "asymptotics.csv")]
    seeds = [cfg.seed] if cfg.initializer == "simulated" else []

    if cfg.num_trials > 0:
        with trace("simulations"):
            simulations, seeds = _simulate(cfg, solvers, logger)
        summary = summarize(simulations, KEYS, SUMMARY_COLUMNS).join(
            asymptotics.drop("init").rename({"status": "solver_status"}), on=KEYS, how="left"
        )
        files += [
            write_frame(simulations, out_dir / "simulations.csv"),
            write_frame(summary, out_dir / "summary.csv", sort_by=KEYS),
        ]

    if cfg.svg:
        from src.experiment.plot import plot_curves

        x = "gamma" if cfg.mode == "gamma" else cfg.vary
        files.append(
            plot_curves(
                asymptotics,
                x,
                ["rho11", "rho12", "rho21", "rho22"],
                out_dir / "asymptotics.svg",
                hue="alpha" if len(cfg.alpha) > 1 else None,
                title="asymptotic alignments",
            )
        )
    return JobOutput(files=files, seeds=seeds)
