"""Figure-scale checks of the limiting laws and the deflation pipeline (slow)."""
import math
import warnings

import numpy as np
import polars as pl
import pytest

from src.asymptotics import sweep_gamma
from src.config import SCHEMAS
from src.constant import EDGE
from src.experiment import EXIT_OK, execute, run_estimate, run_improve, run_solve, run_spectrum
from src.io_util import read_json
from src.pipeline import deflate
from src.rtt import r_real, semicircle_cdf, semicircle_density
from src.spectral import build_N, empirical_stieltjes, histogram, ks_distance, sup_deviation, sym_eigenvalues
from src.tensor import SpikedModel, gen_spiked

pytestmark = pytest.mark.slow

FIGURE_MODEL = dict(beta1=20.0, beta2=15.0, alpha=0.8)


def _run_preset(compose_config, name, command, body, overrides, out_dir):
    cfg = compose_config(name, overrides)
    assert execute(command, cfg, SCHEMAS[command], body, out_dir=out_dir) == EXIT_OK


def _noise_spectrum(p, seed, full=False):
    model = SpikedModel(p=p, seed=seed, **FIGURE_MODEL)
    T, truth = gen_spiked(model)
    f1 = deflate(T, 1.0, truth).factor1
    W = T * math.sqrt(model.n) if full else truth.noise
    return sym_eigenvalues(build_N(W, f1.u, f1.v, f1.w))


def test_semicircle_law():
    spec = _noise_spectrum(200, seed=0)
    hist = histogram(spec, bins=40)
    assert sup_deviation(hist, semicircle_density) < 0.08
    assert ks_distance(spec, semicircle_cdf) < 0.05
    assert abs(empirical_stieltjes(spec, 3.0) - r_real(3.0)) < 0.02
    assert abs(spec.eigenvalues.sum()) < 1e-8


def test_deformed_law(compose_config, tmp_path):
    _run_preset(compose_config, "fig4", "spectrum", run_spectrum, [], tmp_path)
    record = read_json(tmp_path / "spectrum.json")
    assert record["ks_M"] < 0.06
    assert record["ks_N"] < 0.05
    density = pl.read_csv(tmp_path / "density_M.csv")
    assert (density["density"] >= 0).all()


def test_perturbation_gap_shrinks_with_dimension():
    def mean_gap(p):
        gaps = []
        for seed in range(10):
            noise = empirical_stieltjes(_noise_spectrum(p, seed), 3.0)
            full = empirical_stieltjes(_noise_spectrum(p, seed, full=True), 3.0)
            gaps.append(abs(full - noise))
        return np.mean(gaps)

    ratio = mean_gap(40) / mean_gap(20)
    assert 0.3 <= ratio <= 0.8


@pytest.mark.parametrize("alpha", [0.0, 0.3, 0.6])
def test_full_projection_orthogonality(alpha):
    for seed in range(20):
        T, truth = gen_spiked(SpikedModel(p=150, beta1=6.0, beta2=5.7, alpha=alpha, seed=seed))
        assert deflate(T, 1.0, truth).alignments.kappa_hat < 1e-6


@pytest.mark.parametrize("preset, tolerance", [("fig3", 0.05), ("fig9", 0.08)])
def test_asymptotics_match_simulation(compose_config, tmp_path, preset, tolerance):
    _run_preset(compose_config, preset, "solve", run_solve, [], tmp_path)
    summary = pl.read_csv(tmp_path / "summary.csv")
    valid = summary.filter(
        (pl.col("solver_status") == "ok") & pl.col("rho11").is_not_nan() & (pl.col("num_ok") > 0)
    )
    assert valid.height >= 5
    for name in ("rho11", "rho12", "rho21", "rho22"):
        deviation = (valid[name].abs() - valid[f"{name}_hat_mean"]).abs().max()
        assert deviation < tolerance, name


def test_estimation_round_trip(compose_config, tmp_path):
    _run_preset(compose_config, "fig7", "estimate", run_estimate, [], tmp_path)
    summary = pl.read_csv(tmp_path / "summary.csv")
    assert summary["beta1"].to_list() == [6.0, 8.0, 10.0, 12.0]
    assert summary["roundtrip_error"].max() < 1e-6
    ok = summary.filter(pl.col("num_ok") > 0)
    assert ok.height >= 3
    assert ok["beta1_error_mean"].max() < 0.5
    assert ok["beta2_error_mean"].max() < 0.5


def test_improvement_over_full_projection(compose_config, tmp_path):
    overrides = ["num_trials=50"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        _run_preset(compose_config, "fig6", "improve", run_improve, overrides, tmp_path)
    summary = pl.read_csv(tmp_path / "summary.csv")
    difference = (summary["improved_rho2_mean"] - summary["baseline_rho2_mean"]).to_list()
    gain = {round(alpha, 10): value for alpha, value in zip(summary["alpha"].to_list(), difference)}
    assert sorted(gain) == [round(0.1 * i, 10) for i in range(9)]
    for alpha, value in gain.items():
        if alpha >= 0.3:
            assert value > 0.0, alpha
    assert gain[0.5] >= 0.05
    assert abs(gain[0.0]) <= 0.02


def test_gamma_sweep_is_unimodal():
    rows = sweep_gamma(10.0, 8.0, 0.6, [round(0.02 * i, 10) for i in range(51)])
    ok = [row for row in rows if row["status"] == "ok"]
    assert len(ok) >= 40
    curve = np.array([max(abs(row["theta22"]), abs(row["rho22"])) for row in ok])
    interior = (curve[1:-1] > curve[:-2]) & (curve[1:-1] > curve[2:])
    assert int(interior.sum()) == 1


def test_bulk_of_full_projection_stays_at_the_edge():
    model = SpikedModel(p=200, seed=1, **FIGURE_MODEL)
    T, truth = gen_spiked(model)
    run = deflate(T, 1.0, truth)
    f2 = run.factor2
    spec = sym_eigenvalues(build_N(truth.noise, f2.u, f2.v, f2.w), source="M")
    bulk = np.sort(np.abs(spec.eigenvalues))[:-4]
    assert bulk.max() <= EDGE + 0.15
