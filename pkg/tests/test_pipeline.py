import warnings

import numpy as np
import pytest

from src.asymptotics import FirstStepSolution, SecondStepSolution
from src.estimation import ModelEstimate
from src.exception import BoundaryWarning, DomainError, EstimationError, ParameterError
from src.pipeline import (
    EmpiricalAlignments,
    TracePoint,
    assign_components,
    best_gamma,
    deflate,
    factor_alignments,
    gamma_sweep,
    improved_deflation,
    measure_alignments,
    solutions_from_run,
    tracked_alignment,
)
from src.rank_one import RankOneFactor, power_iteration
from src.random_util import make_rng, random_unit_vector
from src.tensor import SpikedModel, contract3, gen_spiked, mode_matmul, outer3, projector


def _trace_point(gamma, tracked):
    return TracePoint(gamma, tracked, 0.0, tracked, 3.0, 0.1, 0.5)


def test_full_projection_orthogonalizes(spiked_correlated):
    T, truth = spiked_correlated
    run = deflate(T, 1.0, truth)
    assert run.alignments.kappa_hat < 1e-6
    assert run.factor1.lam > run.factor2.lam > 0


def test_zero_projection_repeats_the_first_factor(spiked_correlated):
    T, truth = spiked_correlated
    run = deflate(T, 0.0, truth)
    np.testing.assert_allclose(run.factor2.u, run.factor1.u, atol=1e-10)
    assert run.factor2.lam == pytest.approx(run.factor1.lam, rel=1e-10)
    assert run.alignments.kappa_hat == pytest.approx(1.0, abs=1e-10)


def test_deflate_rejects_bad_gamma(spiked_correlated):
    T, _ = spiked_correlated
    with pytest.raises(ParameterError):
        deflate(T, 1.2)


def test_orthogonal_components_are_recovered(spiked_orthogonal):
    T, truth = spiked_orthogonal
    run = deflate(T, 1.0, truth)
    c1, c2 = run.assigned((12.0, 8.0))
    assert (c1, c2) == (0, 1)
    rho1, rho2 = run.component_alignments((12.0, 8.0))
    assert rho1 > 0.9
    assert rho2 > 0.8
    record = run.to_record()
    assert record["gamma"] == 1.0
    assert record["lambda1_hat"] == run.factor1.lam


def test_alignments_with_the_truth_itself():
    _, truth = gen_spiked(SpikedModel(p=20, beta1=3.0, beta2=2.0, alpha=0.4, seed=2))
    factors = (
        RankOneFactor(1.0, truth.x1, truth.y1, truth.z1),
        RankOneFactor(1.0, truth.x2, truth.y2, truth.z2),
    )
    al = measure_alignments(factors, truth)
    assert al.rho11_hat == pytest.approx(1.0)
    assert al.rho22_hat == pytest.approx(1.0)
    assert al.rho12_hat == pytest.approx(0.4)
    assert al.kappa_hat == pytest.approx(0.4)
    assert al.mode_spread == pytest.approx(0.0, abs=1e-12)


def test_random_vectors_are_nearly_orthogonal_to_the_truth():
    _, truth = gen_spiked(SpikedModel(p=400, beta1=3.0, beta2=2.0, alpha=0.0, seed=2))
    rng = make_rng(99)
    factors = tuple(
        RankOneFactor(1.0, *(random_unit_vector(rng, 400) for _ in range(3))) for _ in range(2)
    )
    al = factor_alignments(factors, truth)
    assert max(al.rho1()) < 0.3
    assert max(al.rho2()) < 0.3


def test_alignments_without_truth():
    rng = make_rng(4)
    vectors = [random_unit_vector(rng, 10) for _ in range(3)]
    al = factor_alignments((RankOneFactor(1.0, *vectors), RankOneFactor(1.0, *vectors)))
    assert al.kappa_hat == pytest.approx(1.0)
    assert al.eta_hat == pytest.approx(1.0)
    assert np.isnan(al.rho11_hat)


def test_assign_components_tie_goes_to_larger_snr():
    al = EmpiricalAlignments(rho11_hat=0.5, rho12_hat=0.5)
    assert assign_components(al, (3.0, 5.0)) == (1, 0)
    assert assign_components(al, (5.0, 3.0)) == (0, 1)
    assert assign_components(EmpiricalAlignments(rho11_hat=0.2, rho12_hat=0.7), (9.0, 1.0)) == (1, 0)


def test_solutions_from_run(spiked_correlated):
    T, truth = spiked_correlated
    run = deflate(T, 1.0, truth)
    first, second = solutions_from_run(run)
    assert first.lambda1 == run.factor1.lam
    assert second.kappa == 0.0
    assert second.rho22 == run.alignments.rho22_hat
    partial = deflate(T, 0.5, truth)
    assert solutions_from_run(partial)[1].kappa == partial.alignments.kappa_hat


def test_tracked_alignment_ties_go_to_rho22():
    solution = SecondStepSolution(3.0, 0.1, 0.5, 0.6, -0.6, 0.1, 0.4)
    assert tracked_alignment(solution) == (0.6, 2)
    solution = SecondStepSolution(3.0, 0.1, 0.5, 0.7, 0.2, 0.1, 0.4)
    assert tracked_alignment(solution) == (0.7, 1)


def test_best_gamma():
    assert best_gamma([]) == 1.0
    trace = [_trace_point(1.0, 0.5), _trace_point(0.98, 0.6), _trace_point(0.96, 0.55)]
    assert best_gamma(trace) == 0.98


def test_improved_deflation_rejects_bad_step(spiked_correlated):
    T, _ = spiked_correlated
    with pytest.raises(ParameterError):
        improved_deflation(T, eps_step=0.5)


@pytest.mark.slow
def test_improved_deflation_orthogonal_control():
    T, truth = gen_spiked(SpikedModel(p=40, beta1=12.0, beta2=9.0, alpha=0.0, seed=5))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = improved_deflation(T, truth=truth)
    assert result.gamma_star >= 0.9
    assert result.status in ("ok", "boundary", "estimation_failed")
    _, rho2 = result.component_alignments((12.0, 9.0))
    _, base2 = result.baseline.component_alignments((12.0, 9.0))
    assert rho2 >= base2 - 0.05



FIXED_ESTIMATE = ModelEstimate(12.0, 8.0, 0.5, (0.9, 0.4, 0.1, 0.8, 0.3, 0.8), residual_norm=0.0)


def _scripted_solver(values, eps_step, fail_at=None):
    """solve_second stand-in whose tracked alignment at gamma = 1 - i * eps_step is values[i]."""

    def solver(beta1, beta2, alpha, gamma, first, x0, cfg=None, fp_cfg=None):
        if fail_at is not None and abs(gamma - fail_at) < 1e-9:
            raise DomainError("kappa left [-1, 1]")
        tracked = values[round((1.0 - gamma) / eps_step)]
        return SecondStepSolution(3.0, 0.1, 0.5, 0.1, tracked, 0.2, 0.4, gamma=gamma)

    return solver


def _sweep_inputs():
    first = FirstStepSolution(4.0, 0.9, 0.4)
    start = SecondStepSolution(3.0, 0.1, 0.5, 0.1, 0.5, 0.2, 0.4)
    return (12.0, 8.0, 0.5), first, start


def test_gamma_sweep_stops_after_two_decreases(monkeypatch):
    values = [0.50, 0.55, 0.60, 0.58, 0.59, 0.57, 0.56, 0.70]
    monkeypatch.setattr("src.pipeline.improved.solve_second", _scripted_solver(values, 0.02))
    trace, reached, error = gamma_sweep(*_sweep_inputs(), eps_step=0.02)
    assert reached
    assert error is None
    # a single decrease at 0.94 is reset by the rise at 0.92
    assert [t.gamma for t in trace] == [1.0, 0.98, 0.96, 0.94, 0.92, 0.9, 0.88]
    assert best_gamma(trace) == 0.96


def test_gamma_sweep_runs_to_zero_without_a_maximum(monkeypatch):
    values = [0.1, 0.2, 0.3, 0.4, 0.5]
    monkeypatch.setattr("src.pipeline.improved.solve_second", _scripted_solver(values, 0.2))
    trace, reached, error = gamma_sweep(*_sweep_inputs(), eps_step=0.2)
    assert not reached
    assert error is None
    assert [t.gamma for t in trace] == [1.0, 0.8, 0.6, 0.4, 0.2]
    assert best_gamma(trace) == 0.2


def test_gamma_sweep_reports_solver_failure(monkeypatch):
    values = [0.5, 0.6, 0.7]
    monkeypatch.setattr("src.pipeline.improved.solve_second", _scripted_solver(values, 0.2, fail_at=0.6))
    trace, reached, error = gamma_sweep(*_sweep_inputs(), eps_step=0.2)
    assert not reached
    assert len(trace) == 2
    assert error.startswith("gamma=0.6")


def test_improved_deflation_falls_back_when_estimation_fails(monkeypatch, spiked_correlated):
    T, truth = spiked_correlated

    def failing_estimate(observables, init=None, cfg=None):
        raise EstimationError("no root", residual_norm=0.3)

    monkeypatch.setattr("src.pipeline.improved.estimate", failing_estimate)
    result = improved_deflation(T, truth=truth)
    assert result.status == "estimation_failed"
    assert result.gamma_star == 1.0
    assert result.estimates is None
    assert result.final_factors is None
    assert result.sweep_trace == []
    assert result.alignments is result.baseline.alignments
    assert result.component_alignments((12.0, 8.0)) == result.baseline.component_alignments((12.0, 8.0))
    record = result.to_record()
    assert record["estimates"] is None
    assert "estimation failed" in record["diagnostics"][0]


def test_improved_deflation_warns_at_the_boundary(monkeypatch, spiked_correlated):
    T, truth = spiked_correlated
    monkeypatch.setattr("src.pipeline.improved.estimate", lambda observables, init=None, cfg=None: FIXED_ESTIMATE)
    monkeypatch.setattr(
        "src.pipeline.improved.solve_second", _scripted_solver([0.1, 0.2, 0.3, 0.4, 0.5], 0.2)
    )
    with pytest.warns(BoundaryWarning):
        result = improved_deflation(T, eps_step=0.2, truth=truth)
    assert result.status == "boundary"
    assert result.gamma_star == 0.2
    assert "argmax of the trace" in result.diagnostics[0]
    assert result.final_factors is not None


def test_improved_deflation_assembles_the_second_component(monkeypatch, spiked_correlated):
    T, truth = spiked_correlated
    gamma_star = 0.6
    trace = [_trace_point(1.0, 0.5), _trace_point(0.8, 0.6), _trace_point(0.6, 0.7), _trace_point(0.4, 0.65)]
    monkeypatch.setattr("src.pipeline.improved.estimate", lambda observables, init=None, cfg=None: FIXED_ESTIMATE)
    monkeypatch.setattr("src.pipeline.improved.gamma_sweep", lambda *args, **kwargs: (trace, True, None))
    with warnings.catch_warnings():
        warnings.simplefilter("error", BoundaryWarning)
        result = improved_deflation(T, truth=truth)
    assert result.status == "ok"
    assert result.gamma_star == gamma_star

    f1 = result.baseline.factor1
    mode1 = power_iteration(mode_matmul(T, projector(f1.u, gamma_star), 1))
    mode2 = power_iteration(mode_matmul(T, projector(f1.v, gamma_star), 2))
    strong, weak = result.final_factors
    assert weak.beta == 8.0
    assert strong.beta == 12.0
    # u from the mode-2 pass up to sign, (v, w) from the mode-1 pass
    assert abs(weak.u @ mode2.u) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(weak.v, mode1.v, atol=1e-12)
    np.testing.assert_allclose(weak.w, mode1.w, atol=1e-12)
    assert contract3(T, weak.u, weak.v, weak.w) >= 0.0

    first = power_iteration(T - 8.0 * outer3(weak.u, weak.v, weak.w))
    np.testing.assert_allclose(strong.u, first.u, atol=1e-12)
    assert result.alignments is not None
    assert result.to_record()["final_betas"] == [12.0, 8.0]
