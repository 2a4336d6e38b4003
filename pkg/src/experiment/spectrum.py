import math
from pathlib import Path

import numpy as np

from src.asymptotics import analytic_initializer, solve_point, tau_of
from src.config import SpectrumConfig
from src.constant import EDGE
from src.exception import NumericError
from src.experiment.runner import JobOutput, Solvers, make_solvers
from src.io_util import write_frame, write_json_atomic
from src.logger import BaseLogger
from src.pipeline import DeflationRun, deflate, solutions_from_run
from src.proc_util import trace
from src.rtt import DensityTable, nu_cdf, nu_density, semicircle_cdf, semicircle_density, support_edges
from src.spectral import (
    SpectrumResult,
    build_M,
    build_N,
    histogram,
    ks_distance,
    sup_deviation,
    sym_eigenvalues,
)
from src.tensor import SpikedModel, gen_spiked

GRID_MARGIN = 1.25


def solved_tau(cfg: SpectrumConfig, run: DeflationRun, solvers: Solvers, logger: BaseLogger) -> tuple[float, str]:
    """tau of the second-step law from the asymptotic solution at the run's parameters.

    Seeds are the run's own alignments, then the analytic initializer; when both
    fail the empirical kappa of the run is used.
    """
    if run.gamma == 1.0:
        return -1.0, "exact"
    seeds = [("run", lambda: solutions_from_run(run))]
    seeds.append(("analytic", lambda: analytic_initializer(cfg.beta1, cfg.beta2, cfg.alpha, run.gamma)))
    for name, seed in seeds:
        try:
            _, second = solve_point(
                cfg.beta1, cfg.beta2, cfg.alpha, run.gamma, *seed(), solvers.newton, solvers.fixed_point
            )
            return second.tau, f"solved:{name}"
        except NumericError as e:
            logger.write_event("tau", seed=name, status="failed", message=e)
    return tau_of(run.gamma, run.alignments.kappa_hat), "empirical"


def _write_spectrum(
    name: str,
    spec: SpectrumResult,
    table: DensityTable,
    bins: int,
    out_dir: Path,
    svg: bool,
) -> tuple[list[Path], float]:
    hist = histogram(spec, bins)
    files = [
        write_frame(spec.to_frame(), out_dir / f"spectrum_{name}.csv"),
        write_frame(hist.to_frame(), out_dir / f"histogram_{name}.csv"),
        write_frame(table.to_frame(), out_dir / f"density_{name}.csv"),
    ]
    deviation = sup_deviation(hist, lambda x: np.interp(x, table.grid, table.values, left=0.0, right=0.0))
    if svg:
        from src.experiment.plot import plot_overlay

        files.append(
            plot_overlay(
                hist.bin_center,
                hist.density,
                hist.width,
                table.grid,
                table.values,
                out_dir / f"spectrum_{name}.svg",
                title=f"spectrum of {name}",
            )
        )
    return files, deviation


def run_spectrum(cfg: SpectrumConfig, out_dir: Path, logger: BaseLogger) -> JobOutput:
    """One realization: spectrum of N against the semicircle and, with gamma, of M against nu(tau)."""
    solvers = make_solvers(cfg.solver)
    model = SpikedModel(p=cfg.p, beta1=cfg.beta1, beta2=cfg.beta2, alpha=cfg.alpha, seed=cfg.seed)
    gamma = 1.0 if cfg.gamma is None else cfg.gamma

    with trace("generate tensor"):
        T, truth = gen_spiked(model)
    with trace(f"deflate (gamma={gamma})"):
        run = deflate(T, gamma, truth, solvers.power)
    f1, f2 = run.factors
    W = truth.noise if cfg.matrix_input == "noise" else T * math.sqrt(model.n)

    record = dict(p=cfg.p, beta1=cfg.beta1, beta2=cfg.beta2, alpha=cfg.alpha, seed=cfg.seed, gamma=gamma)
    record.update(run.to_record())

    with trace("spectrum of N"):
        spec_n = sym_eigenvalues(build_N(W, f1.u, f1.v, f1.w), source="N")
    grid = np.linspace(-GRID_MARGIN * EDGE, GRID_MARGIN * EDGE, cfg.grid_points)
    table = DensityTable(grid=grid, values=semicircle_density(grid))
    files, deviation = _write_spectrum("N", spec_n, table, cfg.bins, out_dir, cfg.svg)
    record.update(ks_N=ks_distance(spec_n, semicircle_cdf), sup_deviation_N=deviation)
    print(f"[INFO] N: ks={record['ks_N']:.4f} sup_deviation={deviation:.4f}")

    if cfg.gamma is not None:
        with trace("spectrum of M"):
            spec_m = sym_eigenvalues(build_M(W, f1.u, f2.u, f2.v, f2.w, gamma), source="M")
        with trace("limiting law of M"):
            tau, tau_source = solved_tau(cfg, run, solvers, logger)
            left, right = support_edges(tau)
            half = 0.5 * (right - left)
            center = 0.5 * (right + left)
            grid = np.linspace(center - GRID_MARGIN * half, center + GRID_MARGIN * half, cfg.grid_points)
            table = nu_density(grid, tau, solvers.density_eps)
        m_files, deviation = _write_spectrum("M", spec_m, table, cfg.bins, out_dir, cfg.svg)
        files += m_files
        record.update(
            tau=tau,
            tau_source=tau_source,
            support_left=left,
            support_right=right,
            ks_M=ks_distance(spec_m, nu_cdf(table)),
            sup_deviation_M=deviation,
        )
        print(f"[INFO] M: tau={tau:.6f} ({tau_source}) ks={record['ks_M']:.4f}")

    files.append(write_json_atomic(record, out_dir / "spectrum.json"))
    return JobOutput(files=files, seeds=[cfg.seed])
