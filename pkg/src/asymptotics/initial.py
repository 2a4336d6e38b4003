import math

import numpy as np
from scipy import optimize

from src.asymptotics.first_step import FirstStepSolution
from src.asymptotics.second_step import SecondStepSolution
from src.constant import EDGE
from src.exception import ImpossibleRegimeError
from src.rtt import f_r, h_r

KAPPA_SEED = 1e-5
MAX_ALIGNMENT = 0.99


def _rank_one_gap(lam: float, beta: float) -> float:
    # rank-one reduction: rho = h_r(l) / beta and f_r(l) = beta rho^3
    return beta**2 * f_r(lam).real - h_r(lam).real ** 3


def rank_one_lambda(beta: float, num: int = 400) -> float:
    """Largest root of beta^2 f_r(l) = h_r(l)^3 above the bulk edge."""
    grid = np.linspace(EDGE * (1.0 + 1e-9), beta + 3.0, num)
    gaps = np.array([_rank_one_gap(lam, beta) for lam in grid])
    changes = np.flatnonzero(np.sign(gaps[:-1]) != np.sign(gaps[1:]))
    if changes.size == 0:
        raise ImpossibleRegimeError(f"no rank-one singular value above the edge for beta={beta}")
    i = changes[-1]
    return float(optimize.brentq(_rank_one_gap, grid[i], grid[i + 1], args=(beta,)))


def analytic_first_init(beta1: float, beta2: float, alpha: float) -> FirstStepSolution:
    betas = (beta1, beta2)
    strong = int(np.argmax(betas))
    lam = rank_one_lambda(betas[strong])
    rho = min(h_r(lam).real / betas[strong], MAX_ALIGNMENT)
    rhos = [alpha * rho, alpha * rho]
    rhos[strong] = rho
    return FirstStepSolution(lam, *rhos)


def analytic_second_init(
    beta1: float, beta2: float, alpha: float, gamma: float = 1.0
) -> SecondStepSolution:
    """Rank-one guess for the weaker component after the first one is projected out."""
    betas = (beta1, beta2)
    weak = int(np.argmin(betas))
    residual_norm = math.sqrt(1.0 - alpha**2)
    try:
        beta_eff = betas[weak] * residual_norm
        lam = rank_one_lambda(beta_eff)
    except ImpossibleRegimeError:
        beta_eff = betas[weak]
        lam = rank_one_lambda(beta_eff)
    rho = min(h_r(lam).real / beta_eff, MAX_ALIGNMENT)
    theta = [0.0, 0.0]
    theta[weak] = rho * residual_norm
    rho2 = [alpha * rho, alpha * rho]
    rho2[weak] = rho
    kappa = 0.0 if gamma == 1.0 else KAPPA_SEED
    return SecondStepSolution(lam, *theta, *rho2, kappa=kappa, eta=alpha, gamma=gamma)


def analytic_initializer(
    beta1: float, beta2: float, alpha: float, gamma: float = 1.0
) -> tuple[FirstStepSolution, SecondStepSolution]:
    return (
        analytic_first_init(beta1, beta2, alpha),
        analytic_second_init(beta1, beta2, alpha, gamma),
    )


def seed_kappa(solution: SecondStepSolution, gamma: float) -> SecondStepSolution:
    """Start a gamma < 1 solve from a gamma = 1 point with kappa nudged off zero."""
    kappa = solution.kappa if solution.kappa != 0.0 else KAPPA_SEED
    x = solution.as_array()
    x[5] = kappa
    return SecondStepSolution.from_array(x, gamma=gamma)
