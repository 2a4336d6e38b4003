import warnings
from dataclasses import dataclass, field

import numpy as np

from src.asymptotics import (
    FirstStepSolution,
    SecondStepSolution,
    SolverConfig,
    solve_second,
)
from src.asymptotics.initial import KAPPA_SEED
from src.estimation import ModelEstimate, Observables, estimate
from src.exception import BoundaryWarning, NumericError, ParameterError
from src.pipeline.alignment import EmpiricalAlignments, assign_components, factor_alignments
from src.pipeline.deflation import DeflationRun, deflate
from src.rank_one import PowerIterConfig, RankOneFactor, power_iteration
from src.rtt import FixedPointConfig
from src.tensor import GroundTruth, Tensor3, contract3, mode_matmul, outer3, projector

DEFAULT_EPS_STEP = 0.02
# consecutive decreases of the tracked alignment that declare the maximum
DECREASES_TO_STOP = 2


@dataclass(frozen=True, eq=False)
class SignalComponent:
    beta: float
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    def as_factor(self) -> RankOneFactor:
        return RankOneFactor(self.beta, self.u, self.v, self.w)


@dataclass(frozen=True)
class TracePoint:
    gamma: float
    tracked: float
    rho21: float
    rho22: float
    lambda2: float
    kappa: float
    eta: float


@dataclass(eq=False)
class ImprovedResult:
    gamma_star: float
    estimates: ModelEstimate | None
    final_factors: tuple[SignalComponent, SignalComponent] | None
    sweep_trace: list[TracePoint]
    baseline: DeflationRun
    status: str = "ok"
    diagnostics: list[str] = field(default_factory=list)
    alignments: EmpiricalAlignments | None = None

    def component_alignments(self, betas: tuple[float, float]) -> tuple[float, float]:
        if self.alignments is None:
            return self.baseline.component_alignments(betas)
        c1, c2 = assign_components(self.alignments, betas)
        return float(self.alignments.rho1()[c1]), float(self.alignments.rho2()[c2])

    def to_record(self) -> dict:
        record = dict(gamma_star=self.gamma_star, status=self.status)
        record["diagnostics"] = list(self.diagnostics)
        record["baseline"] = self.baseline.to_record()
        record["estimates"] = None if self.estimates is None else self.estimates.to_record()
        record["sweep_trace"] = [
            dict(
                gamma=t.gamma,
                tracked=t.tracked,
                rho21=t.rho21,
                rho22=t.rho22,
                lambda2=t.lambda2,
                kappa=t.kappa,
                eta=t.eta,
            )
            for t in self.sweep_trace
        ]
        record["final"] = None if self.alignments is None else self.alignments.to_record()
        if self.final_factors is not None:
            record["final_betas"] = [c.beta for c in self.final_factors]
        return record


def tracked_alignment(solution: SecondStepSolution) -> tuple[float, int]:
    """max(|rho21|, |rho22|) and the component attaining it; ties go to rho22."""
    rho21, rho22 = abs(solution.rho21), abs(solution.rho22)
    if rho22 >= rho21:
        return rho22, 2
    return rho21, 1


def gamma_sweep(
    beta_hat: tuple[float, float, float],
    first: FirstStepSolution,
    start: SecondStepSolution,
    eps_step: float,
    cfg: SolverConfig | None = None,
    fp_cfg: FixedPointConfig | None = None,
) -> tuple[list[TracePoint], bool, str | None]:
    """Walk gamma down from 1 by eps_step until the tracked alignment has peaked.

    Returns the trace, whether the maximum was reached, and the error that
    stopped the walk if any.
    """
    beta1, beta2, alpha = beta_hat
    trace: list[TracePoint] = []
    x0 = start
    decreases = 0
    gamma = 1.0
    while gamma > 1e-12:
        try:
            solution = solve_second(beta1, beta2, alpha, gamma, first, x0, cfg, fp_cfg)
        except NumericError as e:
            return trace, False, f"gamma={gamma:.4g}: {e}"
        tracked, _ = tracked_alignment(solution)
        if trace and tracked < trace[-1].tracked:
            decreases += 1
        else:
            decreases = 0
        trace.append(
            TracePoint(
                gamma=gamma,
                tracked=tracked,
                rho21=solution.rho21,
                rho22=solution.rho22,
                lambda2=solution.lambda2,
                kappa=solution.kappa,
                eta=solution.eta,
            )
        )
        if decreases >= DECREASES_TO_STOP:
            return trace, True, None
        x0 = solution if solution.kappa != 0.0 else _nudge(solution)
        gamma = round(gamma - eps_step, 12)
    return trace, False, None


def _nudge(solution: SecondStepSolution) -> SecondStepSolution:
    x = solution.as_array()
    x[5] = KAPPA_SEED
    return SecondStepSolution.from_array(x, gamma=solution.gamma)


def best_gamma(trace: list[TracePoint]) -> float:
    if not trace:
        return 1.0
    return trace[int(np.argmax([t.tracked for t in trace]))].gamma


def _second_component(T: Tensor3, run: DeflationRun, gamma_star: float, cfg: PowerIterConfig | None):
    f13 = power_iteration(mode_matmul(T, projector(run.factor1.u, gamma_star), 1), cfg)
    f14 = power_iteration(mode_matmul(T, projector(run.factor1.v, gamma_star), 2), cfg)
    u2, v2, w2 = f14.u, f13.v, f13.w
    # u from the mode-2 pass, (v, w) from the mode-1 pass; orient u so T(u, v, w) >= 0
    if contract3(T, u2, v2, w2) < 0:
        u2 = -u2
    return u2, v2, w2


def improved_deflation(
    T: Tensor3,
    eps_step: float = DEFAULT_EPS_STEP,
    truth: GroundTruth | None = None,
    power_cfg: PowerIterConfig | None = None,
    solver_cfg: SolverConfig | None = None,
    fp_cfg: FixedPointConfig | None = None,
) -> ImprovedResult:
    """Orthogonalized deflation with the projection strength gamma tuned from asymptotics.

    1. gamma = 1 deflation, observables (lambda1, lambda2, |<v1, v2>|).
    2. Model parameters and alignments from the observables.
    3. Predicted max(rho21, rho22) over gamma = 1, 1 - eps, ... until it peaks.
    4. Second component from T x_1 (I - g* u1 u1^T) and T x_2 (I - g* v1 v1^T),
       first component re-estimated from T - min(beta) u2* v2* w2*.
    """
    if not 0.0 < eps_step <= 0.2:
        raise ParameterError(f"eps_step must be in (0, 0.2] (specified: {eps_step})")

    baseline = deflate(T, 1.0, truth, power_cfg)
    f1, f2 = baseline.factors
    eta_hat = float(abs(f1.v @ f2.v))

    try:
        observables = Observables(f1.lam, f2.lam, min(eta_hat, 1.0))
        est = estimate(observables, cfg=solver_cfg)
    except NumericError as e:
        return ImprovedResult(
            gamma_star=1.0,
            estimates=None,
            final_factors=None,
            sweep_trace=[],
            baseline=baseline,
            status="estimation_failed",
            diagnostics=[f"estimation failed, returning the gamma = 1 deflation: {e}"],
            alignments=baseline.alignments if truth is not None else None,
        )

    rho11, rho12, theta21, theta22, rho21, rho22 = est.rho_hat
    first = FirstStepSolution(f1.lam, rho11, rho12)
    start = SecondStepSolution(
        f2.lam, theta21, theta22, rho21, rho22, kappa=KAPPA_SEED, eta=eta_hat
    )
    trace, reached, error = gamma_sweep(
        (est.beta1_hat, est.beta2_hat, est.alpha_hat), first, start, eps_step, solver_cfg, fp_cfg
    )
    diagnostics = []
    status = "ok"
    if not reached:
        status = "boundary"
        message = error or "gamma sweep reached 0 without a maximum"
        diagnostics.append(f"{message}; using the argmax of the trace")
        warnings.warn(message, BoundaryWarning, stacklevel=2)
    gamma_star = best_gamma(trace)

    u2, v2, w2 = _second_component(T, baseline, gamma_star, power_cfg)
    beta_min, beta_max = min(est.betas), max(est.betas)
    f15 = power_iteration(T - beta_min * outer3(u2, v2, w2), power_cfg)
    final = (
        SignalComponent(beta_max, f15.u, f15.v, f15.w),
        SignalComponent(beta_min, u2, v2, w2),
    )
    alignments = None
    if truth is not None:
        alignments = factor_alignments((final[0].as_factor(), final[1].as_factor()), truth)
    return ImprovedResult(
        gamma_star=gamma_star,
        estimates=est,
        final_factors=final,
        sweep_trace=trace,
        baseline=baseline,
        status=status,
        diagnostics=diagnostics,
        alignments=alignments,
    )
