import numpy as np

from src.asymptotics import FirstStepSolution, first_step_residual, gamma1_residual


def psi(beta, lam, rho) -> np.ndarray:
    """Nine-component residual map linking observables to model parameters.

    Parameters
    ----------
    beta : (beta1, beta2, alpha)
    lam : observables (lambda1, lambda2, eta)
    rho : alignments (rho11, rho12, theta21, theta22, rho21, rho22)

    Rows 1-3 are the first-deflation system, rows 4-9 the gamma = 1 second-deflation
    system, both evaluated with the semicircle transform.
    """
    beta1, beta2, alpha = (float(v) for v in beta)
    lambda1, lambda2, eta = (float(v) for v in lam)
    rho11, rho12, theta21, theta22, rho21, rho22 = (float(v) for v in rho)

    first = FirstStepSolution(lambda1, rho11, rho12)
    return np.concatenate(
        [
            first_step_residual(beta1, beta2, alpha, first.as_array()),
            gamma1_residual(
                beta1,
                beta2,
                alpha,
                first,
                [lambda2, theta21, theta22, rho21, rho22, eta],
            ),
        ]
    )
