from dataclasses import dataclass

import numpy as np

from src.asymptotics.newton import NewtonResult, SolverConfig, inf_norm, newton_solve
from src.constant import EDGE, FIRST_STEP_FIELDS
from src.exception import DomainError, ImpossibleRegimeError, NumericError
from src.rtt import r_real

FIRST_STEP_TOL = 1e-10


@dataclass(frozen=True)
class FirstStepSolution:
    lambda1: float
    rho11: float
    rho12: float
    residual_norm: float = 0.0
    degenerate: bool = False

    def as_array(self) -> np.ndarray:
        return np.array([self.lambda1, self.rho11, self.rho12])

    @property
    def rho(self) -> np.ndarray:
        return np.array([self.rho11, self.rho12])

    @classmethod
    def from_array(cls, x, **kwargs) -> "FirstStepSolution":
        return cls(*(float(v) for v in x), **kwargs)

    def to_record(self) -> dict:
        record = dict(zip(FIRST_STEP_FIELDS, self.as_array().tolist()))
        record["first_residual"] = self.residual_norm
        return record


def alpha_matrix(alpha: float) -> np.ndarray:
    """alpha_ij = alpha for i != j, 1 on the diagonal."""
    return np.array([[1.0, alpha], [alpha, 1.0]])


def first_step_residual(beta1: float, beta2: float, alpha: float, x) -> np.ndarray:
    """f_r(l) - sum_i b_i rho_i^3 and h_r(l) rho_j - sum_i b_i a_ij rho_i^2 for j = 1, 2."""
    lam, rho1, rho2 = x
    r = r_real(lam)
    beta = np.array([beta1, beta2])
    rho = np.array([rho1, rho2])
    return np.concatenate(
        [
            [lam + r - beta @ rho**3],
            (-1.0 / r) * rho - alpha_matrix(alpha) @ (beta * rho**2),
        ]
    )


def pinned_components(beta1: float, beta2: float, alpha: float) -> list[int]:
    """Component indices whose alignments are exactly zero by symmetry (absent, uncorrelated)."""
    if alpha != 0.0:
        return []
    return [i for i, beta in enumerate((beta1, beta2)) if beta == 0.0]


def solve_pinned(F, x0: np.ndarray, pinned: list[int], cfg: SolverConfig) -> NewtonResult:
    """Newton over the free unknowns; pinned unknowns stay at x0 and their rows are dropped."""
    free = np.array([i for i in range(x0.size) if i not in pinned])

    def reduced(y: np.ndarray) -> np.ndarray:
        x = x0.copy()
        x[free] = y
        return F(x)[free]

    result = newton_solve(reduced, x0[free], cfg)
    x = x0.copy()
    x[free] = result.x
    return NewtonResult(x=x, residual_norm=result.residual_norm, iterations=result.iterations)


def solve_first(
    beta1: float,
    beta2: float,
    alpha: float,
    init: FirstStepSolution,
    cfg: SolverConfig | None = None,
) -> FirstStepSolution:
    """Limiting singular value and alignments (lambda1, rho11, rho12) of the first deflation."""
    cfg = cfg or SolverConfig()
    if not init.lambda1 > EDGE:
        raise ImpossibleRegimeError(
            f"initial lambda1={init.lambda1:.6g} is inside the bulk (edge {EDGE:.6g})"
        )

    # absent uncorrelated components have exactly zero alignment (row index = 1 + component)
    pinned = [1 + i for i in pinned_components(beta1, beta2, alpha)]
    x0 = init.as_array()
    x0[pinned] = 0.0

    def F(x):
        return first_step_residual(beta1, beta2, alpha, x)

    try:
        result = solve_pinned(F, x0, pinned, cfg)
    except DomainError as e:
        raise ImpossibleRegimeError(
            f"inside bulk, recovery impossible regime (beta=({beta1}, {beta2}), alpha={alpha}): {e}"
        ) from e

    x = result.x
    if not x[0] > EDGE:
        raise ImpossibleRegimeError(f"lambda1={x[0]:.6g} collapsed onto the bulk edge")
    residual = inf_norm(F(x))
    if residual >= max(FIRST_STEP_TOL, cfg.tol):
        raise NumericError(f"first-step residual {residual:.3e} above tolerance")
    return FirstStepSolution.from_array(
        x, residual_norm=residual, degenerate=min(beta1, beta2) == 0.0
    )
