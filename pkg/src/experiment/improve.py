import itertools
import warnings
from dataclasses import asdict
from functools import partial
from pathlib import Path

from src.asymptotics import SolverConfig
from src.config import ImproveConfig
from src.exception import BoundaryWarning, NumericError, OutOfModelWarning
from src.experiment.runner import (
    JobOutput,
    fan_out,
    frame_from_rows,
    log_failures,
    make_solvers,
    summarize,
)
from src.io_util import write_frame, write_json_atomic
from src.logger import BaseLogger
from src.pipeline import improved_deflation
from src.proc_util import trace
from src.random_util import trial_seed
from src.rank_one import PowerIterConfig
from src.rtt import FixedPointConfig
from src.tensor import SpikedModel, gen_spiked

KEYS = ["beta1", "beta2", "alpha"]
# rows that carry a deflation result (estimation failures fall back to gamma = 1)
VALID_STATUSES = ("ok", "boundary", "estimation_failed")
VALUE_COLUMNS = [
    "gamma_star",
    "baseline_rho1",
    "baseline_rho2",
    "improved_rho1",
    "improved_rho2",
    "gain_rho2",
    "beta1_hat",
    "beta2_hat",
    "alpha_hat",
    "sweep_length",
]
SUMMARY_COLUMNS = [c for c in VALUE_COLUMNS if c != "sweep_length"]


def improve_trial(
    task: dict,
    p: int,
    eps_step: float,
    power_cfg: PowerIterConfig,
    newton_cfg: SolverConfig,
    fp_cfg: FixedPointConfig,
) -> dict:
    """Improved deflation of one realization next to its gamma = 1 baseline."""
    row = dict(task)
    row.update(dict.fromkeys(VALUE_COLUMNS))
    model = SpikedModel(p=p, beta1=task["beta1"], beta2=task["beta2"], alpha=task["alpha"], seed=task["seed"])
    T, truth = gen_spiked(model)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BoundaryWarning)
            warnings.simplefilter("ignore", OutOfModelWarning)
            result = improved_deflation(T, eps_step, truth, power_cfg, newton_cfg, fp_cfg)
    except NumericError as e:
        row.update(status="failed", message=str(e))
        return dict(row=row, trace=[], record=None)

    baseline_rho1, baseline_rho2 = result.baseline.component_alignments(model.betas)
    improved_rho1, improved_rho2 = result.component_alignments(model.betas)
    row.update(
        gamma_star=result.gamma_star,
        baseline_rho1=baseline_rho1,
        baseline_rho2=baseline_rho2,
        improved_rho1=improved_rho1,
        improved_rho2=improved_rho2,
        gain_rho2=improved_rho2 - baseline_rho2,
        sweep_length=len(result.sweep_trace),
        status=result.status,
        message="; ".join(result.diagnostics) or None,
    )
    if result.estimates is not None:
        row.update(
            beta1_hat=result.estimates.beta1_hat,
            beta2_hat=result.estimates.beta2_hat,
            alpha_hat=result.estimates.alpha_hat,
        )
    trace_rows = [
        dict(alpha=task["alpha"], trial=task["trial"], **asdict(point)) for point in result.sweep_trace
    ]
    return dict(row=row, trace=trace_rows, record=dict(task, **result.to_record()))


def run_improve(cfg: ImproveConfig, out_dir: Path, logger: BaseLogger) -> JobOutput:
    """Improved deflation against the gamma = 1 baseline over a list of alphas."""
    solvers = make_solvers(cfg.solver)
    tasks = [
        dict(beta1=cfg.beta1, beta2=cfg.beta2, alpha=alpha, trial=trial, seed=trial_seed(cfg.seed, trial))
        for alpha, trial in itertools.product(cfg.alpha, range(cfg.num_trials))
    ]
    print(f"[INFO] improve: {len(cfg.alpha)} alphas x {cfg.num_trials} trials")

    trial_fn = partial(
        improve_trial,
        p=cfg.p,
        eps_step=cfg.eps_step,
        power_cfg=solvers.power,
        newton_cfg=solvers.newton,
        fp_cfg=solvers.fixed_point,
    )
    with trace("improved deflation trials"):
        results = fan_out(trial_fn, tasks, cfg.env.num_workers, desc="improve")

    # boundary and fallback rows stay in the averages; log_failures still records them
    rows = log_failures([result["row"] for result in results], logger, KEYS + ["trial"])
    trials = frame_from_rows(rows).sort(KEYS + ["trial"])
    summary = summarize(trials, KEYS, SUMMARY_COLUMNS, valid=VALID_STATUSES)
    files = [
        write_frame(trials, out_dir / "trials.csv"),
        write_frame(summary, out_dir / "summary.csv"),
    ]

    trace_rows = [point for result in results for point in result["trace"]]
    if trace_rows:
        traces = frame_from_rows(trace_rows).sort(["alpha", "trial", "gamma"])
        files.append(write_frame(traces, out_dir / "sweep_traces.csv"))
    if cfg.num_trials == 1:
        records = [result["record"] for result in results if result["record"] is not None]
        files.append(write_json_atomic(records, out_dir / "improve.json"))

    if cfg.svg:
        from src.experiment.plot import plot_curves

        files.append(
            plot_curves(
                summary,
                "alpha",
                ["baseline_rho2_mean", "improved_rho2_mean"],
                out_dir / "improvement.svg",
                title="second component alignment",
            )
        )
    return JobOutput(files=files, seeds=sorted({t["seed"] for t in tasks}))
