from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from src.exception import (
    ConvergenceError,
    DomainError,
    NumericError,
    ParameterError,
    SingularJacobianError,
    StagnationError,
)


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-11
    max_iter: int = 100
    damping: float = 1.0
    max_halvings: int = 30
    # alternation between the Newton pass and the tau refresh
    outer_max_iter: int = 60
    joint_tol: float = 1e-9
    rank_tol: float = 1e-13
    fd_step: float = 1e-7

    def __post_init__(self):
        if self.tol <= 0 or self.joint_tol <= 0:
            raise ParameterError(f"tolerances must be positive (specified: {self.tol}, {self.joint_tol})")
        if self.max_iter < 1 or self.outer_max_iter < 1:
            raise ParameterError("iteration caps must be >= 1")
        if not 0.0 < self.damping <= 1.0:
            raise ParameterError(f"damping must be in (0, 1] (specified: {self.damping})")


@dataclass(frozen=True, eq=False)
class NewtonResult:
    x: np.ndarray
    residual_norm: float
    iterations: int


def inf_norm(f: np.ndarray) -> float:
    return float(np.max(np.abs(f))) if f.size else 0.0


def _evaluate(F: Callable[[np.ndarray], np.ndarray], x: np.ndarray) -> np.ndarray:
    f = np.asarray(F(x), dtype=np.float64)
    if not np.all(np.isfinite(f)):
        raise NumericError("residual function returned non-finite values")
    return f


def numerical_jacobian(
    F: Callable[[np.ndarray], np.ndarray], x: np.ndarray, f0: np.ndarray, step: float
) -> np.ndarray:
    """Central differences with step h_i = step * (1 + |x_i|); one-sided next to a domain wall."""
    J = np.empty((f0.size, x.size))
    for i in range(x.size):
        h = step * (1.0 + abs(x[i]))
        e = np.zeros_like(x)
        e[i] = h
        try:
            f_plus = _evaluate(F, x + e)
        except DomainError:
            f_plus = None
        try:
            f_minus = _evaluate(F, x - e)
        except DomainError:
            f_minus = None
        if f_plus is not None and f_minus is not None:
            J[:, i] = (f_plus - f_minus) / (2.0 * h)
        elif f_plus is not None:
            J[:, i] = (f_plus - f0) / h
        elif f_minus is not None:
            J[:, i] = (f0 - f_minus) / h
        else:
            raise DomainError(f"residual undefined on both sides of x[{i}]={x[i]:.6g}")
    return J


def newton_solve(
    F: Callable[[np.ndarray], np.ndarray],
    x0,
    cfg: SolverConfig | None = None,
) -> NewtonResult:
    """Damped Newton with a finite-difference Jacobian and step halving.

    A trial step is accepted only if it strictly decreases the residual inf-norm;
    a trial where F raises DomainError counts as no decrease.
    """
    cfg = cfg or SolverConfig()
    x = np.array(x0, dtype=np.float64)
    f = _evaluate(F, x)
    norm = inf_norm(f)

    for iteration in range(cfg.max_iter + 1):
        if norm < cfg.tol:
            return NewtonResult(x=x, residual_norm=norm, iterations=iteration)
        if iteration == cfg.max_iter:
            break

        J = numerical_jacobian(F, x, f, cfg.fd_step)
        sv = np.linalg.svd(J, compute_uv=False)
        if sv[0] == 0.0 or sv[-1] <= cfg.rank_tol * sv[0]:
            raise SingularJacobianError(
                f"Jacobian is singular (condition {sv[0] / max(sv[-1], 1e-300):.3e}) at x={x}",
                x=x,
                residuals=f,
            )
        step = cfg.damping * np.linalg.solve(J, -f)

        t = 1.0
        for _ in range(cfg.max_halvings + 1):
            trial = x + t * step
            try:
                f_trial = _evaluate(F, trial)
            except NumericError:
                f_trial = None
            if f_trial is not None and inf_norm(f_trial) < norm:
                x, f, norm = trial, f_trial, inf_norm(f_trial)
                break
            t *= 0.5
        else:
            raise StagnationError(
                f"no residual decrease after {cfg.max_halvings} step halvings (residual {norm:.3e})",
                x=x,
                residuals=f,
            )

    raise ConvergenceError(
        f"Newton did not converge in {cfg.max_iter} iterations (residual {norm:.3e})",
        residuals=f,
    )
