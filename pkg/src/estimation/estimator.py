import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from src.asymptotics import (
    FirstStepSolution,
    SecondStepSolution,
    SolverConfig,
    analytic_initializer,
    newton_solve,
    solve_first,
    solve_second_gamma1,
)
from src.asymptotics.newton import inf_norm
from src.constant import ALIGNMENT_FIELDS, EDGE, OBSERVABLE_FIELDS
from src.estimation.psi import psi
from src.exception import (
    EstimationError,
    ImpossibleRegimeError,
    NumericError,
    OutOfModelWarning,
    ParameterError,
)
from src.rtt import f_r, h_r

ESTIMATE_TOL = 1e-8


@dataclass(frozen=True)
class Observables:
    lambda1_hat: float
    lambda2_hat: float
    eta_hat: float

    def __post_init__(self):
        if not self.lambda1_hat > EDGE:
            raise ImpossibleRegimeError(
                f"lambda1_hat={self.lambda1_hat:.6g} <= 2 sqrt(2/3): inside the bulk, estimation refused"
            )
        if not self.lambda2_hat > EDGE:
            raise ImpossibleRegimeError(
                f"lambda2_hat={self.lambda2_hat:.6g} <= 2 sqrt(2/3): inside the bulk, estimation refused"
            )
        if not 0.0 <= self.eta_hat <= 1.0:
            raise ParameterError(f"eta_hat must be in [0, 1] (specified: {self.eta_hat})")

    def as_array(self) -> np.ndarray:
        return np.array([self.lambda1_hat, self.lambda2_hat, self.eta_hat])

    def to_record(self) -> dict:
        return dict(zip(OBSERVABLE_FIELDS, self.as_array().tolist()))


@dataclass(frozen=True)
class ModelEstimate:
    beta1_hat: float
    beta2_hat: float
    alpha_hat: float
    rho_hat: tuple[float, ...]  # rho11, rho12, theta21, theta22, rho21, rho22
    residual_norm: float
    out_of_model: bool = False
    init: str = "default"
    diagnostics: list[str] = field(default_factory=list)

    @property
    def betas(self) -> tuple[float, float]:
        return self.beta1_hat, self.beta2_hat

    def alpha_reported(self) -> float:
        """alpha_hat clamped to [0, 1) for reports; the raw value stays in alpha_hat."""
        return min(max(self.alpha_hat, 0.0), math.nextafter(1.0, 0.0))

    def to_record(self) -> dict:
        record = dict(
            beta1_hat=self.beta1_hat,
            beta2_hat=self.beta2_hat,
            alpha_hat=self.alpha_hat,
            alpha_reported=self.alpha_reported(),
            residual_norm=self.residual_norm,
            out_of_model=self.out_of_model,
        )
        record.update({f"{name}_tilde": value for name, value in zip(ALIGNMENT_FIELDS, self.rho_hat)})
        return record


def default_initializer(obs: Observables) -> np.ndarray:
    """beta0 = (l1, l1 / 2), alpha0 = eta, rho11 = 0.9, rho12 = 0.9 alpha0, 0.7/0.3 on the second step."""
    alpha0 = obs.eta_hat
    return np.array(
        [
            obs.lambda1_hat,
            obs.lambda1_hat / 2.0,
            alpha0,
            0.9,
            0.9 * alpha0,
            0.3,
            0.7,
            0.3,
            0.7,
        ]
    )


def _rank_one_beta(lam: float) -> tuple[float, float]:
    # invert the rank-one relations f_r = beta rho^3, h_r = beta rho
    f, h = f_r(lam).real, h_r(lam).real
    beta = math.sqrt(h**3 / f)
    return beta, min(h / beta, 0.99)


def plug_in_initializer(obs: Observables) -> np.ndarray:
    """Each singular value read as an isolated rank-one spike."""
    beta1, rho1 = _rank_one_beta(obs.lambda1_hat)
    beta2, rho2 = _rank_one_beta(obs.lambda2_hat)
    alpha0 = obs.eta_hat
    return np.array([beta1, beta2, alpha0, rho1, alpha0 * rho1, 0.1, rho2, alpha0 * rho2, rho2])


def _swap_components(y: np.ndarray) -> np.ndarray:
    # beta1<->beta2, rho11<->rho12, theta21<->theta22, rho21<->rho22
    return y[[1, 0, 2, 4, 3, 6, 5, 8, 7]]


def estimate(
    observables: Observables,
    init: tuple | np.ndarray | None = None,
    cfg: SolverConfig | None = None,
) -> ModelEstimate:
    """Solve psi(beta, lambda_hat, rho) = 0 for (beta1, beta2, alpha) and six alignments.

    `init` is (beta0, rho0) with beta0 = (beta1, beta2, alpha); without it the
    documented default guess is tried first, then the rank-one plug-in guess.
    """
    cfg = cfg or SolverConfig()
    lam = observables.as_array()

    if init is not None:
        beta0, rho0 = init
        seeds = [("given", np.concatenate([np.asarray(beta0, float), np.asarray(rho0, float)]))]
    else:
        seeds = [
            ("default", default_initializer(observables)),
            ("plug_in", plug_in_initializer(observables)),
        ]

    def F(y: np.ndarray) -> np.ndarray:
        return psi(y[:3], lam, y[3:])

    diagnostics = []
    last_residual = None
    for name, y0 in seeds:
        try:
            y = newton_solve(F, y0, cfg).x
            break
        except NumericError as e:
            diagnostics.append(f"{name}: {e}")
            if getattr(e, "residuals", None) is not None:
                last_residual = inf_norm(e.residuals)
    else:
        raise EstimationError(
            "estimation failed from every initial guess: " + "; ".join(diagnostics),
            residual_norm=last_residual,
        )

    if y[1] > y[0]:
        y = _swap_components(y)
    residual = inf_norm(F(y))
    if residual >= ESTIMATE_TOL:
        raise EstimationError(f"estimate residual {residual:.3e} above tolerance", residual_norm=residual)

    alpha_hat = float(y[2])
    out_of_model = not 0.0 <= alpha_hat < 1.0
    if out_of_model:
        warnings.warn(
            f"alpha_hat={alpha_hat:.4g} lies outside [0, 1)", OutOfModelWarning, stacklevel=2
        )
    return ModelEstimate(
        beta1_hat=float(y[0]),
        beta2_hat=float(y[1]),
        alpha_hat=alpha_hat,
        rho_hat=tuple(float(v) for v in y[3:]),
        residual_norm=residual,
        out_of_model=out_of_model,
        init=name,
        diagnostics=diagnostics,
    )


def forward_observables(
    beta1: float,
    beta2: float,
    alpha: float,
    first_init: FirstStepSolution | None = None,
    second_init: SecondStepSolution | None = None,
    cfg: SolverConfig | None = None,
) -> tuple[Observables, FirstStepSolution, SecondStepSolution]:
    """Noiseless asymptotic observables (lambda1, lambda2, |eta|) of a model."""
    if first_init is None or second_init is None:
        first_init, second_init = analytic_initializer(beta1, beta2, alpha, 1.0)
    first = solve_first(beta1, beta2, alpha, first_init, cfg)
    second = solve_second_gamma1(beta1, beta2, alpha, first, second_init, cfg)
    obs = Observables(first.lambda1, second.lambda2, abs(second.eta))
    return obs, first, second
