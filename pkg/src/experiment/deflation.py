import itertools
from functools import partial
from pathlib import Path

from src.config import DeflateConfig, grid_values
from src.exception import DegenerateInputError, NumericError
from src.experiment.runner import (
    JobOutput,
    fan_out,
    frame_from_rows,
    log_failures,
    make_solvers,
    summarize,
    sweep_axis,
)
from src.io_util import write_frame, write_json_atomic
from src.logger import BaseLogger
from src.pipeline import EmpiricalAlignments, deflate
from src.proc_util import trace
from src.random_util import trial_seed
from src.rank_one import PowerIterConfig
from src.tensor import SpikedModel, dump_tensor, gen_spiked

KEYS = ["beta1", "beta2", "alpha", "gamma"]
VALUE_COLUMNS = [
    "lambda1_hat",
    "lambda2_hat",
    "n_iter1",
    "n_iter2",
    *EmpiricalAlignments().to_record().keys(),
    "rho1_matched",
    "rho2_matched",
]
SUMMARY_COLUMNS = [
    "lambda1_hat",
    "lambda2_hat",
    "rho1_matched",
    "rho2_matched",
    "rho11_hat",
    "rho12_hat",
    "rho21_hat",
    "rho22_hat",
    "kappa_hat",
    "eta_hat",
]


def deflate_trial(
    task: dict,
    p: int,
    gammas: list[float],
    noiseless: bool,
    power_cfg: PowerIterConfig,
    dump_dir: Path | None = None,
) -> list[dict]:
    """One tensor realization deflated at every gamma; one row per gamma."""
    model = SpikedModel(
        p=p,
        beta1=task["beta1"],
        beta2=task["beta2"],
        alpha=task["alpha"],
        seed=task["seed"],
        noiseless=noiseless,
    )
    T, truth = gen_spiked(model)
    if dump_dir is not None and task["trial"] == 0:
        name = "tensor_b1={beta1:g}_b2={beta2:g}_a={alpha:g}.csv".format(**task)
        dump_tensor(T, dump_dir / name)

    rows = []
    for gamma in gammas:
        row = dict(task, gamma=gamma)
        try:
            run = deflate(T, gamma, truth, power_cfg)
        except (NumericError, DegenerateInputError) as e:
            status = "degenerate" if isinstance(e, DegenerateInputError) else "failed"
            row.update(dict.fromkeys(VALUE_COLUMNS), status=status, message=str(e))
            rows.append(row)
            continue
        record = run.to_record()
        record.pop("gamma")
        rho1, rho2 = run.component_alignments(model.betas)
        row.update(record, rho1_matched=rho1, rho2_matched=rho2, status="ok")
        rows.append(row)
    return rows


def run_deflate(cfg: DeflateConfig, out_dir: Path, logger: BaseLogger) -> JobOutput:
    """Seeded deflation trials over a (beta1, beta2, alpha) grid and a list of gammas."""
    solvers = make_solvers(cfg.solver)
    tasks = [
        dict(beta1=beta1, beta2=beta2, alpha=alpha, trial=trial, seed=trial_seed(cfg.seed, trial))
        for beta1, beta2, alpha, trial in itertools.product(
            grid_values(cfg.beta1), grid_values(cfg.beta2), cfg.alpha, range(cfg.num_trials)
        )
    ]
    seeds = sorted({task["seed"] for task in tasks})
    print(f"[INFO] deflate: {len(tasks)} realizations x {len(cfg.gamma)} gammas")

    trial_fn = partial(
        deflate_trial,
        p=cfg.p,
        gammas=list(cfg.gamma),
        noiseless=cfg.noiseless,
        power_cfg=solvers.power,
        dump_dir=out_dir.resolve() if cfg.dump_tensor else None,
    )
    with trace("deflation trials"):
        results = fan_out(trial_fn, tasks, cfg.env.num_workers, desc="deflate")
    rows = log_failures([row for rows in results for row in rows], logger, KEYS + ["trial"])

    df = frame_from_rows(rows).sort(KEYS + ["trial"])
    summary = summarize(df, KEYS, SUMMARY_COLUMNS)
    files = [
        write_frame(df, out_dir / "trials.csv"),
        write_frame(summary, out_dir / "summary.csv"),
    ]
    if cfg.dump_tensor:
        files += sorted(out_dir.resolve().glob("tensor_*.csv"))
    if cfg.num_trials == 1:
        files.append(write_json_atomic(df.to_dicts(), out_dir / "deflate.json"))
    if cfg.svg:
        from src.experiment.plot import plot_curves

        x = sweep_axis(summary, ["beta2", "beta1", "alpha", "gamma"])
        hue = next((k for k in ("alpha", "gamma") if k != x and summary[k].n_unique() > 1), None)
        files.append(
            plot_curves(
                summary,
                x,
                ["rho1_matched_mean", "rho2_matched_mean"],
                out_dir / "alignments.svg",
                hue=hue,
                title="deflation alignments",
            )
        )
    return JobOutput(files=files, seeds=seeds)
