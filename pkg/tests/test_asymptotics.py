import numpy as np
import pytest

from src.asymptotics import (
    FirstStepSolution,
    SecondStepSolution,
    SolverConfig,
    analytic_first_init,
    analytic_initializer,
    first_step_residual,
    joint_residual,
    newton_solve,
    rank_one_lambda,
    second_step_residual,
    seed_kappa,
    solve_first,
    solve_second,
    solve_second_gamma1,
    tau_of,
)
from src.exception import (
    ConvergenceError,
    ImpossibleRegimeError,
    ParameterError,
    SingularJacobianError,
)
from src.rtt import f_r, h_r, r_real

BETAS = (12.0, 6.0, 0.3)


@pytest.fixture(scope="module")
def gamma1_point():
    beta1, beta2, alpha = BETAS
    first_init, second_init = analytic_initializer(beta1, beta2, alpha, 1.0)
    first = solve_first(beta1, beta2, alpha, first_init)
    second = solve_second_gamma1(beta1, beta2, alpha, first, second_init)
    return first, second


def test_newton_scalar_root():
    result = newton_solve(lambda x: x**2 - 4.0, [1.0])
    assert result.x[0] == pytest.approx(2.0, abs=1e-10)
    assert result.residual_norm < 1e-11


def test_newton_linear_system():
    A = np.array([[3.0, 1.0], [1.0, 2.0]])
    b = np.array([9.0, 8.0])
    result = newton_solve(lambda x: A @ x - b, np.zeros(2))
    np.testing.assert_allclose(result.x, np.linalg.solve(A, b), atol=1e-10)
    assert result.iterations <= 3


def test_newton_singular_jacobian():
    with pytest.raises(SingularJacobianError):
        newton_solve(lambda x: np.array([x[0] + x[1] - 1.0, x[0] + x[1] - 1.0]), np.zeros(2))


def test_newton_iteration_cap():
    with pytest.raises(ConvergenceError) as info:
        newton_solve(lambda x: x**2 - 4.0, [1.0], SolverConfig(max_iter=1))
    assert info.value.residuals is not None


def test_solver_config_validation():
    with pytest.raises(ParameterError):
        SolverConfig(damping=0.0)
    with pytest.raises(ParameterError):
        SolverConfig(tol=-1.0)


def test_tau_of():
    assert tau_of(1.0, 0.0) == -1.0
    assert tau_of(0.0, 0.4) == pytest.approx(-1.4)
    assert tau_of(1.0, 1.0) == 0.0


def test_rank_one_lambda_solves_reduced_system():
    lam = rank_one_lambda(10.0)
    rho = h_r(lam).real / 10.0
    assert 0 < rho < 1
    assert f_r(lam).real == pytest.approx(10.0 * rho**3, abs=1e-9)


def test_rank_one_lambda_below_threshold():
    with pytest.raises(ImpossibleRegimeError):
        rank_one_lambda(0.5)


def test_first_step_rank_one_reduction():
    first = solve_first(10.0, 0.0, 0.0, analytic_first_init(10.0, 0.0, 0.0))
    assert first.rho12 == 0.0
    assert first.lambda1 == pytest.approx(rank_one_lambda(10.0), abs=1e-8)
    assert first.rho11 == pytest.approx(h_r(first.lambda1).real / 10.0, abs=1e-8)
    assert first.degenerate


def test_first_step_swap_symmetry():
    a = solve_first(10.0, 6.0, 0.3, analytic_first_init(10.0, 6.0, 0.3))
    b = solve_first(6.0, 10.0, 0.3, analytic_first_init(6.0, 10.0, 0.3))
    assert a.lambda1 == pytest.approx(b.lambda1, abs=1e-9)
    assert a.rho11 == pytest.approx(b.rho12, abs=1e-9)
    assert a.rho12 == pytest.approx(b.rho11, abs=1e-9)


def test_first_step_residual_is_small(gamma1_point):
    first, _ = gamma1_point
    assert first.residual_norm < 1e-10
    assert np.max(np.abs(first_step_residual(*BETAS, first.as_array()))) < 1e-10
    assert first.rho11 > first.rho12 > 0


def test_first_step_inside_bulk():
    with pytest.raises(ImpossibleRegimeError):
        solve_first(10.0, 6.0, 0.3, FirstStepSolution(1.0, 0.9, 0.3))


def test_general_system_reduces_at_gamma_one(gamma1_point):
    first, second = gamma1_point
    assert second.kappa == 0.0
    r2 = r_real(second.lambda2)
    residual = second_step_residual(*BETAS, 1.0, first, second.as_array(), r2 / 3, r2 / 3)
    assert np.max(np.abs(residual)) < 1e-9


def test_general_solver_agrees_with_full_projection_solver(gamma1_point):
    first, second = gamma1_point
    general = solve_second(*BETAS, 1.0, first, second)
    np.testing.assert_allclose(general.as_array(), second.as_array(), atol=1e-8)
    assert general.tau == pytest.approx(-1.0, abs=1e-8)


def test_gamma_zero_repeats_the_first_step(gamma1_point):
    first, second = gamma1_point
    repeat = solve_second(*BETAS, 0.0, first, second)
    assert repeat.lambda2 == first.lambda1
    assert repeat.rho21 == first.rho11
    assert repeat.rho22 == first.rho12
    assert repeat.kappa == 1.0


def test_partial_projection(gamma1_point):
    first, second = gamma1_point
    solution = solve_second(*BETAS, 0.7, first, seed_kappa(second, 0.7))
    assert solution.residual_norm < 1e-9
    assert abs(solution.kappa) <= 1.0
    assert solution.tau == pytest.approx(tau_of(0.7, solution.kappa))
    assert joint_residual(*BETAS, 0.7, first, solution) < 1e-8


def test_second_step_rejects_bad_gamma(gamma1_point):
    first, second = gamma1_point
    with pytest.raises(ParameterError):
        solve_second(*BETAS, 1.5, first, second)


def test_second_step_inside_support(gamma1_point):
    first, _ = gamma1_point
    init = SecondStepSolution(1.0, 0.1, 0.8, 0.1, 0.8, kappa=0.1, eta=0.3)
    with pytest.raises(ImpossibleRegimeError):
        solve_second(*BETAS, 0.5, first, init)


def test_seed_kappa_moves_off_zero(gamma1_point):
    _, second = gamma1_point
    seeded = seed_kappa(second, 0.5)
    assert seeded.kappa > 0
    assert seeded.gamma == 0.5
    assert seeded.lambda2 == second.lambda2
