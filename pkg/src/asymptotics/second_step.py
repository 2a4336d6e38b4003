from dataclasses import dataclass, replace

import numpy as np

from src.asymptotics.first_step import (
    FirstStepSolution,
    alpha_matrix,
    pinned_components,
    solve_pinned,
)
from src.asymptotics.newton import SolverConfig, inf_norm
from src.constant import GAMMA1_FIELDS, SECOND_STEP_FIELDS
from src.exception import (
    ConvergenceError,
    DomainError,
    ImpossibleRegimeError,
    NumericError,
    ParameterError,
)
from src.rtt import FixedPointConfig, r_real, stieltjes_fixed_point, support_right_edge

EDGE_MARGIN = 1e-6
# unknown order: lambda2, theta21, theta22, rho21, rho22, kappa, eta
KAPPA = 5
ETA = 6


def tau_of(gamma: float, kappa: float) -> float:
    return gamma * kappa**2 - 1.0 + kappa * (gamma - 1.0)


def _law_tau(gamma: float, kappa: float) -> float:
    # tau = (kappa + 1)(gamma kappa - 1) <= 0 for |kappa| <= 1
    tau = tau_of(gamma, kappa)
    if tau > 0.0:
        raise DomainError(f"kappa={kappa:.6g} gives tau={tau:.3e} > 0 at gamma={gamma}")
    return tau


@dataclass(frozen=True)
class SecondStepSolution:
    lambda2: float
    theta21: float
    theta22: float
    rho21: float
    rho22: float
    kappa: float
    eta: float
    gamma: float = 1.0
    tau: float = -1.0
    residual_norm: float = 0.0
    degenerate: bool = False

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in SECOND_STEP_FIELDS])

    @property
    def theta(self) -> np.ndarray:
        return np.array([self.theta21, self.theta22])

    @property
    def rho(self) -> np.ndarray:
        return np.array([self.rho21, self.rho22])

    @property
    def tracked_alignment(self) -> float:
        """max(rho21, rho22): the quantity maximized over gamma."""
        return max(abs(self.rho21), abs(self.rho22))

    @classmethod
    def from_array(cls, x, **kwargs) -> "SecondStepSolution":
        return cls(*(float(v) for v in x), **kwargs)

    def to_record(self) -> dict:
        record = dict(zip(SECOND_STEP_FIELDS, self.as_array().tolist()))
        record.update(
            gamma=self.gamma,
            tau=self.tau,
            second_residual=self.residual_norm,
            degenerate=self.degenerate,
        )
        return record


def second_step_residual(
    beta1: float,
    beta2: float,
    alpha: float,
    gamma: float,
    first: FirstStepSolution,
    x,
    a: float,
    b: float,
) -> np.ndarray:
    """Seven residuals of the second-deflation system with a(lambda2), b(lambda2) given."""
    lam2, th1, th2, rh1, rh2, kappa, eta = x
    beta = np.array([beta1, beta2])
    theta = np.array([th1, th2])
    rho2 = np.array([rh1, rh2])
    rho1 = first.rho
    A = alpha_matrix(alpha)
    r1 = r_real(first.lambda1)
    f_q = lam2 + a + 2.0 * b

    s_rho1_rho2sq = beta @ (rho1 * rho2**2)
    row_lambda = (
        f_q
        - gamma * kappa * eta**2 / 3.0 * r1
        - 2.0 * gamma * kappa**2 * b
        - (beta @ (theta * rho2**2) - gamma * kappa * s_rho1_rho2sq)
    )
    row_theta = (
        (f_q - a) * theta
        - gamma * rho1 * (eta**2 / 3.0 * r1 + 2.0 * kappa * b)
        - (A @ (beta * rho2**2) - gamma * rho1 * s_rho1_rho2sq)
    )
    row_kappa = (lam2 + 2.0 * (1.0 - gamma) * b) * kappa - (1.0 - gamma) * (
        s_rho1_rho2sq - eta**2 / 3.0 * r1
    )
    row_rho = (f_q - (1.0 + gamma * kappa**2) * b) * rho2 - (
        A @ (beta * theta * rho2)
        - gamma * kappa * (A @ (beta * rho1 * rho2) - rho1 * eta / 3.0 * r1)
    )
    row_eta = (lam2 + a + (1.0 - gamma * kappa**2) * b - gamma * kappa / 3.0 * r1) * eta - (
        beta @ (theta * rho1 * rho2) - gamma * kappa * beta @ (rho1**2 * rho2)
    )
    return np.concatenate([[row_lambda], row_theta, [row_kappa], row_rho, [row_eta]])


def gamma1_residual(
    beta1: float, beta2: float, alpha: float, first: FirstStepSolution, x
) -> np.ndarray:
    """Six residuals of the gamma = 1 system (kappa = 0, semicircle transform only)."""
    lam2, th1, th2, rh1, rh2, eta = x
    beta = np.array([beta1, beta2])
    theta = np.array([th1, th2])
    rho2 = np.array([rh1, rh2])
    rho1 = first.rho
    A = alpha_matrix(alpha)
    r1 = r_real(first.lambda1)
    r2 = r_real(lam2)
    h2 = -1.0 / r2

    row_lambda = lam2 + r2 - beta @ (theta * rho2**2)
    row_theta = (
        h2 * theta
        - eta**2 / 3.0 * r1 * rho1
        - (A @ (beta * rho2**2) - rho1 * (beta @ (rho1 * rho2**2)))
    )
    row_rho = h2 * rho2 - A @ (beta * theta * rho2)
    row_eta = (lam2 + 2.0 / 3.0 * r2) * eta - beta @ (theta * rho1 * rho2)
    return np.concatenate([[row_lambda], row_theta, row_rho, [row_eta]])


def _pinned_second(beta1: float, beta2: float, alpha: float) -> list[int]:
    # theta2i sits at 1 + i and rho2i at 3 + i in both unknown layouts
    pinned = []
    for i in pinned_components(beta1, beta2, alpha):
        pinned += [1 + i, 3 + i]
    return pinned


def _wrap_domain(e: Exception, beta1, beta2, alpha, gamma) -> ImpossibleRegimeError:
    return ImpossibleRegimeError(
        f"lambda2 inside supp(nu), second component unrecoverable "
        f"(beta=({beta1}, {beta2}), alpha={alpha}, gamma={gamma}): {e}"
    )


def solve_second_gamma1(
    beta1: float,
    beta2: float,
    alpha: float,
    first: FirstStepSolution,
    init: SecondStepSolution,
    cfg: SolverConfig | None = None,
) -> SecondStepSolution:
    cfg = cfg or SolverConfig()
    x_full = init.as_array()
    x0 = np.delete(x_full, KAPPA)
    pinned = _pinned_second(beta1, beta2, alpha)
    x0[pinned] = 0.0

    def F(x):
        return gamma1_residual(beta1, beta2, alpha, first, x)

    try:
        result = solve_pinned(F, x0, pinned, cfg)
    except DomainError as e:
        raise _wrap_domain(e, beta1, beta2, alpha, 1.0) from e

    x = result.x
    edge = support_right_edge(-1.0)
    if not x[0] > edge + EDGE_MARGIN:
        raise ImpossibleRegimeError(f"lambda2={x[0]:.6g} is not above the bulk edge {edge:.6g}")
    residual = inf_norm(F(x))
    values = dict(zip(GAMMA1_FIELDS, x.tolist()))
    return SecondStepSolution(
        **values,
        kappa=0.0,
        gamma=1.0,
        tau=-1.0,
        residual_norm=residual,
        degenerate=min(beta1, beta2) == 0.0 or first.degenerate,
    )


class _StieltjesAt:
    """a(lambda2), b(lambda2) at fixed tau, warm-started from the previous evaluation."""

    def __init__(self, tau: float, edge: float, fp_cfg: FixedPointConfig):
        self.tau = tau
        self.edge = edge
        self.fp_cfg = replace(fp_cfg, check_domain=False)
        self.last: tuple[complex, complex] | None = None

    def __call__(self, lam2: float) -> tuple[float, float]:
        if not lam2 > self.edge:
            raise DomainError(f"lambda2={lam2:.6g} inside supp(nu) (edge {self.edge:.6g})")
        try:
            state = stieltjes_fixed_point(lam2, self.tau, self.fp_cfg, init=self.last)
        except NumericError:
            if self.last is None:
                raise
            state = stieltjes_fixed_point(lam2, self.tau, self.fp_cfg)
        self.last = (state.a, state.b)
        return state.a.real, state.b.real


def joint_residual(
    beta1: float,
    beta2: float,
    alpha: float,
    gamma: float,
    first: FirstStepSolution,
    solution: SecondStepSolution,
    fp_cfg: FixedPointConfig | None = None,
) -> float:
    """Residual inf-norm with a, b recomputed at tau(kappa) of the solution itself."""
    tau = tau_of(gamma, solution.kappa)
    state = stieltjes_fixed_point(solution.lambda2, tau, fp_cfg)
    x = solution.as_array()
    return inf_norm(
        second_step_residual(
            beta1, beta2, alpha, gamma, first, x, state.a.real, state.b.real
        )
    )


def _no_projection(first: FirstStepSolution) -> SecondStepSolution:
    # gamma = 0 deflates nothing: the second step sees the first tensor again
    return SecondStepSolution(
        lambda2=first.lambda1,
        theta21=first.rho11,
        theta22=first.rho12,
        rho21=first.rho11,
        rho22=first.rho12,
        kappa=1.0,
        eta=1.0,
        gamma=0.0,
        tau=-1.0,
        residual_norm=first.residual_norm,
        degenerate=first.degenerate,
    )


def solve_second(
    beta1: float,
    beta2: float,
    alpha: float,
    gamma: float,
    first: FirstStepSolution,
    init: SecondStepSolution,
    cfg: SolverConfig | None = None,
    fp_cfg: FixedPointConfig | None = None,
) -> SecondStepSolution:
    """Second-deflation asymptotics for a general gamma.

    Alternates a Newton pass on the seven equations at fixed tau with a refresh of
    tau = gamma kappa^2 - 1 + kappa (gamma - 1), until the joint residual is small.
    """
    cfg = cfg or SolverConfig()
    fp_cfg = fp_cfg or FixedPointConfig()
    if not 0.0 <= gamma <= 1.0:
        raise ParameterError(f"gamma must be in [0, 1] (specified: {gamma})")
    if gamma == 0.0:
        return _no_projection(first)

    x = init.as_array()
    pinned = _pinned_second(beta1, beta2, alpha)
    x[pinned] = 0.0
    tau = _law_tau(gamma, x[KAPPA])
    edge = support_right_edge(tau)
    if not x[0] > edge:
        raise ImpossibleRegimeError(
            f"initial lambda2={x[0]:.6g} is inside supp(nu) (edge {edge:.6g}, tau={tau:.6g})"
        )

    joint = np.inf
    for _ in range(cfg.outer_max_iter):
        ab = _StieltjesAt(tau, edge, fp_cfg)

        def F(y, ab=ab):
            a, b = ab(y[0])
            return second_step_residual(beta1, beta2, alpha, gamma, first, y, a, b)

        try:
            x = solve_pinned(F, x, pinned, cfg).x
        except DomainError as e:
            raise _wrap_domain(e, beta1, beta2, alpha, gamma) from e

        tau_new = _law_tau(gamma, x[KAPPA])
        edge = support_right_edge(tau_new)
        if not x[0] > edge + EDGE_MARGIN:
            raise ImpossibleRegimeError(
                f"lambda2={x[0]:.6g} entered supp(nu) (edge {edge:.6g}, tau={tau_new:.6g})"
            )
        ab_new = _StieltjesAt(tau_new, edge, fp_cfg)
        a, b = ab_new(x[0])
        joint = inf_norm(second_step_residual(beta1, beta2, alpha, gamma, first, x, a, b))
        tau = tau_new
        if joint < cfg.joint_tol:
            break
    else:
        raise ConvergenceError(
            f"tau alternation did not converge in {cfg.outer_max_iter} rounds (residual {joint:.3e})",
            residuals=joint,
        )

    return SecondStepSolution.from_array(
        x,
        gamma=gamma,
        tau=tau,
        residual_norm=joint,
        degenerate=min(beta1, beta2) == 0.0 or first.degenerate,
    )
