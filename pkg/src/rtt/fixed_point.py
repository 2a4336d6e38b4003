import math
from dataclasses import dataclass

import numpy as np

from src.constant import EDGE
from src.exception import ConvergenceError, DomainError, NumericError, ParameterError
from src.rtt.semicircle import r_semicircle

PIVOT_TOL = 1e-300
HERGLOTZ_TOL = 1e-12


@dataclass(frozen=True)
class FixedPointConfig:
    tol: float = 1e-13
    max_iter: int = 10_000
    # a Newton polish is tried every polish_after sweeps
    polish_after: int = 500
    residual_tol: float = 1e-12
    newton_max_iter: int = 100
    check_domain: bool = True

    def __post_init__(self):
        if self.tol <= 0 or self.residual_tol <= 0:
            raise ParameterError(f"tolerances must be positive (specified: {self.tol}, {self.residual_tol})")
        if min(self.max_iter, self.polish_after, self.newton_max_iter) < 1:
            raise ParameterError("iteration counts must be >= 1")


@dataclass(frozen=True)
class StieltjesState:
    z: complex
    tau: float
    a: complex
    b: complex
    n_iter: int = 0

    @property
    def q(self) -> complex:
        return self.a + 2.0 * self.b

    def residuals(self) -> tuple[float, float]:
        return fixed_point_residuals(self.z, self.tau, self.a, self.b)

    def conjugate(self) -> "StieltjesState":
        return StieltjesState(
            self.z.conjugate(),
            self.tau,
            self.a.conjugate(),
            self.b.conjugate(),
            self.n_iter,
        )


def check_tau(tau: float) -> float:
    """nu(tau) exists for tau <= 0 only; -tau is the variance coupling the last two blocks."""
    tau = float(tau)
    if not math.isfinite(tau) or tau > 0.0:
        raise ParameterError(f"tau must be finite and <= 0 (specified: {tau})")
    return tau


def fixed_point_residuals(z, tau, a, b):
    """|(2b + z) a + 1/3| and |(a + z - tau b) b + 1/3|."""
    return (
        np.abs((2.0 * b + z) * a + 1.0 / 3.0),
        np.abs((a + z - tau * b) * b + 1.0 / 3.0),
    )


def initial_guess(z):
    """a = b = r(z)/3 where the semicircle transform exists, else -1/(3z)."""
    z = np.asarray(z, dtype=np.complex128)
    inside = (z.imag == 0.0) & (np.abs(z.real) < EDGE)
    safe = np.where(inside, 1j, z)
    guess = np.where(inside, -1.0 / (3.0 * np.where(z == 0, 1.0, z)), r_semicircle(safe) / 3.0)
    if guess.ndim == 0:
        return complex(guess)
    return guess


def newton_step(z, tau, a, b):
    """One Newton step on the 2x2 fixed-point system (scalars or arrays)."""
    F1 = (2.0 * b + z) * a + 1.0 / 3.0
    F2 = (a + z - tau * b) * b + 1.0 / 3.0
    J11 = 2.0 * b + z
    J12 = 2.0 * a
    J21 = b
    J22 = a + z - 2.0 * tau * b
    det = J11 * J22 - J12 * J21
    if np.any(np.abs(det) < PIVOT_TOL):
        raise NumericError(f"singular fixed-point Jacobian at z={z}")
    da = (J22 * F1 - J12 * F2) / det
    db = (J11 * F2 - J21 * F1) / det
    return a - da, b - db, np.maximum(np.abs(da), np.abs(db))


def _polish(z: complex, tau: float, a: complex, b: complex, cfg: FixedPointConfig):
    for _ in range(cfg.newton_max_iter):
        a, b, change = newton_step(z, tau, a, b)
        small_step = change < cfg.tol * (1.0 + abs(a) + abs(b))
        if small_step or max(fixed_point_residuals(z, tau, a, b)) < 0.01 * cfg.residual_tol:
            return a, b
    raise ConvergenceError(
        f"Newton polishing of the fixed point failed at z={z}, tau={tau}",
        residuals=fixed_point_residuals(z, tau, a, b),
    )


def stieltjes_fixed_point(
    z: complex,
    tau: float,
    cfg: FixedPointConfig | None = None,
    init: tuple[complex, complex] | None = None,
) -> StieltjesState:
    """Solve (2b + z) a + 1/3 = 0, (a + z - tau b) b + 1/3 = 0 by alternating updates.

    a <- -1 / (3 (2b + z)),  b <- -1 / (3 (a + z - tau b)); damped once the residual
    grows twice in a row. Every cfg.polish_after sweeps a Newton polish is tried; a
    polish that fails or leaves the Herglotz branch resumes the plain iteration.
    """
    cfg = cfg or FixedPointConfig()
    z = complex(z)
    tau = check_tau(tau)
    if z.imag < 0:
        return stieltjes_fixed_point(z.conjugate(), tau, cfg, init=_conj(init)).conjugate()
    if z.imag == 0.0 and cfg.check_domain:
        # local import: density depends on this module
        from src.rtt.density import support_edges

        left, right = support_edges(tau)
        if left <= z.real <= right:
            raise DomainError(
                f"z={z.real:.6g} lies in the support [{left:.6g}, {right:.6g}] of nu(tau={tau:.6g})"
            )

    if init is None:
        a = b = initial_guess(z)
    else:
        a, b = complex(init[0]), complex(init[1])

    damped = False
    increases = 0
    res_prev = np.inf
    n_iter = 0
    polished = False
    for n_iter in range(1, cfg.max_iter + 1):
        den_a = 3.0 * (2.0 * b + z)
        if abs(den_a) < PIVOT_TOL:
            raise NumericError(f"zero pivot 2b + z at z={z}")
        a_prop = -1.0 / den_a
        den_b = 3.0 * (a_prop + z - tau * b)
        if abs(den_b) < PIVOT_TOL:
            raise NumericError(f"zero pivot a + z - tau b at z={z}")
        b_prop = -1.0 / den_b
        if damped:
            a_prop = 0.5 * a + 0.5 * a_prop
            b_prop = 0.5 * b + 0.5 * b_prop
        change = max(abs(a_prop - a), abs(b_prop - b))
        a, b = a_prop, b_prop
        if change < cfg.tol:
            break
        res = max(fixed_point_residuals(z, tau, a, b))
        increases = increases + 1 if res > res_prev else 0
        res_prev = res
        if increases >= 2:
            damped = True
        if n_iter % cfg.polish_after == 0:
            # near the support edge the plain iteration contracts slowly
            try:
                a_new, b_new = _polish(z, tau, a, b, cfg)
            except NumericError:
                continue
            # the solution with Im a, Im b >= 0 is unique
            if z.imag > 0 and min(a_new.imag, b_new.imag) < -HERGLOTZ_TOL:
                continue
            a, b, polished = a_new, b_new, True
            break
    else:
        raise ConvergenceError(
            f"fixed point did not converge in {cfg.max_iter} iterations at z={z}",
            residuals=fixed_point_residuals(z, tau, a, b),
        )

    if not polished:
        a, b = _polish(z, tau, a, b, cfg)
    if z.imag == 0.0:
        a, b = complex(a.real, 0.0), complex(b.real, 0.0)

    state = StieltjesState(z=z, tau=tau, a=a, b=b, n_iter=n_iter)
    res = max(state.residuals())
    if not res < cfg.residual_tol:
        raise ConvergenceError(
            f"fixed-point residual {res:.3e} above {cfg.residual_tol:.1e} at z={z}",
            residuals=state.residuals(),
        )
    if z.imag > 0 and state.q.imag < -HERGLOTZ_TOL:
        raise DomainError(f"non-Herglotz branch at z={z}: Im q = {state.q.imag:.3e}")
    return state


def _conj(init):
    if init is None:
        return None
    return tuple(complex(x).conjugate() for x in init)


