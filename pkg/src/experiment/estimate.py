import itertools
import warnings
from functools import partial
from pathlib import Path

from src.asymptotics import SolverConfig
from src.config import EstimateConfig, grid_values
from src.constant import ALIGNMENT_FIELDS, EMPIRICAL_FIELDS, OBSERVABLE_FIELDS
from src.estimation import Observables, estimate, forward_observables
from src.exception import ImpossibleRegimeError, NumericError, OutOfModelWarning
from src.experiment.runner import (
    JobOutput,
    fan_out,
    frame_from_rows,
    log_failures,
    make_solvers,
    summarize,
    sweep_axis,
)
from src.io_util import write_frame
from src.logger import BaseLogger
from src.pipeline import deflate
from src.proc_util import trace
from src.random_util import trial_seed
from src.rank_one import PowerIterConfig
from src.tensor import SpikedModel, gen_spiked

KEYS = ["beta1", "beta2", "alpha"]
TILDE_FIELDS = [f"{name}_tilde" for name in ALIGNMENT_FIELDS]
ESTIMATE_FIELDS = ["beta1_hat", "beta2_hat", "alpha_hat", "alpha_reported", "residual_norm", "out_of_model"]
ERROR_FIELDS = ["beta1_error", "beta2_error", "alpha_error"]
VALUE_COLUMNS = OBSERVABLE_FIELDS + ESTIMATE_FIELDS + TILDE_FIELDS + EMPIRICAL_FIELDS + ERROR_FIELDS
SUMMARY_COLUMNS = (
    ["beta1_hat", "beta2_hat", "alpha_hat"] + ERROR_FIELDS + TILDE_FIELDS + EMPIRICAL_FIELDS[:6]
)


def _status(error: Exception) -> str:
    return "impossible" if isinstance(error, ImpossibleRegimeError) else "failed"


def estimate_trial(
    task: dict, p: int, power_cfg: PowerIterConfig, newton_cfg: SolverConfig
) -> dict:
    """gamma = 1 deflation of one realization followed by parameter estimation."""
    row = dict(task)
    row.update(dict.fromkeys(VALUE_COLUMNS))
    model = SpikedModel(p=p, beta1=task["beta1"], beta2=task["beta2"], alpha=task["alpha"], seed=task["seed"])
    T, truth = gen_spiked(model)
    try:
        run = deflate(T, 1.0, truth, power_cfg)
        row.update({name: getattr(run.alignments, name) for name in EMPIRICAL_FIELDS})
        row.update(lambda1_hat=run.factor1.lam, lambda2_hat=run.factor2.lam, eta_hat=run.alignments.eta_hat)
        observables = Observables(run.factor1.lam, run.factor2.lam, min(run.alignments.eta_hat, 1.0))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OutOfModelWarning)
            est = estimate(observables, cfg=newton_cfg)
    except NumericError as e:
        row.update(status=_status(e), message=str(e))
        return row

    row.update(est.to_record())
    row.update(
        beta1_error=abs(est.beta1_hat - task["beta1"]),
        beta2_error=abs(est.beta2_hat - task["beta2"]),
        alpha_error=abs(est.alpha_reported() - task["alpha"]),
        status="ok",
    )
    return row


def roundtrip_row(point: tuple[float, float, float], newton_cfg: SolverConfig) -> dict:
    """Estimate from the noiseless asymptotic observables of the true parameters."""
    beta1, beta2, alpha = point
    row = dict(beta1=beta1, beta2=beta2, alpha=alpha, roundtrip_error=None, roundtrip_status="ok")
    try:
        observables, _, _ = forward_observables(beta1, beta2, alpha, cfg=newton_cfg)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OutOfModelWarning)
            est = estimate(observables, cfg=newton_cfg)
    except NumericError as e:
        row["roundtrip_status"] = _status(e)
        return row
    row["roundtrip_error"] = max(
        abs(est.beta1_hat - beta1), abs(est.beta2_hat - beta2), abs(est.alpha_hat - alpha)
    )
    return row


def run_estimate(cfg: EstimateConfig, out_dir: Path, logger: BaseLogger) -> JobOutput:
    """Parameter estimation trials over a (beta1, beta2, alpha) grid."""
    solvers = make_solvers(cfg.solver)
    points = list(itertools.product(grid_values(cfg.beta1), grid_values(cfg.beta2), cfg.alpha))
    tasks = [
        dict(beta1=beta1, beta2=beta2, alpha=alpha, trial=trial, seed=trial_seed(cfg.seed, trial))
        for (beta1, beta2, alpha), trial in itertools.product(points, range(cfg.num_trials))
    ]
    print(f"[INFO] estimate: {len(points)} parameter points x {cfg.num_trials} trials")

    trial_fn = partial(estimate_trial, p=cfg.p, power_cfg=solvers.power, newton_cfg=solvers.newton)
    with trace("estimation trials"):
        rows = fan_out(trial_fn, tasks, cfg.env.num_workers, desc="estimate")
    rows = log_failures(rows, logger, KEYS + ["trial"])
    trials = frame_from_rows(rows).sort(KEYS + ["trial"])
    summary = summarize(trials, KEYS, SUMMARY_COLUMNS)
    files = [write_frame(trials, out_dir / "trials.csv")]

    if cfg.roundtrip:
        with trace("asymptotic round trip"):
            roundtrip = frame_from_rows([roundtrip_row(point, solvers.newton) for point in points])
        for row in roundtrip.filter(roundtrip["roundtrip_status"] != "ok").iter_rows(named=True):
            logger.write_event("roundtrip", **row)
        summary = summary.join(roundtrip, on=KEYS, how="left")

    files.append(write_frame(summary, out_dir / "summary.csv", sort_by=KEYS))
    if cfg.svg:
        from src.experiment.plot import plot_curves

        x = sweep_axis(summary, ["beta1", "alpha", "beta2"])
        files.append(
            plot_curves(
                summary,
                x,
                ["beta1_hat_mean", "beta2_hat_mean", "alpha_hat_mean"],
                out_dir / "estimates.svg",
                title="estimated parameters",
            )
        )
        files.append(
            plot_curves(
                summary,
                x,
                ["rho11_tilde_mean", "rho11_hat_mean", "rho22_tilde_mean", "rho22_hat_mean"],
                out_dir / "alignments.svg",
                title="estimated vs simulated alignments",
            )
        )
    return JobOutput(files=files, seeds=sorted({t["seed"] for t in tasks}))
