import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from src.constant import EDGE
from src.exception import ConvergenceError, DomainError, ParameterError
from src.rtt import (
    FixedPointConfig,
    f_r,
    h_r,
    nu_cdf,
    nu_density,
    r_real,
    r_semicircle,
    semicircle_cdf,
    semicircle_density,
    stieltjes_fixed_point,
    stieltjes_on_grid,
    support_edges,
    support_right_edge,
)


def test_r_reference_values():
    assert r_real(EDGE) == pytest.approx(-1.224745, abs=1e-6)
    assert r_real(2.0) == pytest.approx(-0.633975, abs=1e-6)
    assert r_real(-2.0) == pytest.approx(0.633975, abs=1e-6)


def test_r_solves_its_quadratic():
    # 2/3 r^2 + z r + 1 = 0
    for z in (2.0, 5.0 + 1j, -0.3 + 0.2j, 1e4):
        r = r_semicircle(z)
        assert abs((2 / 3) * r**2 + z * r + 1) < 1e-10


def test_r_is_herglotz():
    z = np.array([0.0 + 0.1j, 1.0 + 0.01j, -5.0 + 2j])
    assert np.all(r_semicircle(z).imag > 0)


def test_r_inside_bulk_raises():
    with pytest.raises(DomainError):
        r_semicircle(0.5)


def test_semicircle_density_and_cdf():
    assert semicircle_density(0.0) == pytest.approx(3 / (4 * math.pi) * math.sqrt(8 / 3), rel=1e-12)
    assert semicircle_density(0.0) == pytest.approx(0.389711, abs=2e-4)
    assert semicircle_density(2.0) == 0.0
    assert semicircle_cdf(0.0) == pytest.approx(0.5, abs=1e-12)
    assert semicircle_cdf(-EDGE) == pytest.approx(0.0, abs=1e-12)
    assert semicircle_cdf(EDGE) == pytest.approx(1.0, abs=1e-12)


def test_fixed_point_collapses_to_semicircle():
    for x in np.linspace(1.65, 12.0, 20):
        state = stieltjes_fixed_point(x, tau=-1.0)
        assert abs(state.q - r_semicircle(x)) < 1e-10
        assert abs(state.a - state.b) < 1e-10
        assert max(state.residuals()) < 1e-12


def test_transform_identities():
    for x in np.linspace(1.65, 12.0, 20):
        assert h_r(x) == pytest.approx(x + (2 / 3) * r_semicircle(x), abs=1e-12)
        assert f_r(x) == pytest.approx(x + r_semicircle(x), abs=1e-12)


def test_fixed_point_in_upper_half_plane():
    state = stieltjes_fixed_point(0.3 + 0.5j, tau=-0.4)
    assert max(state.residuals()) < 1e-12
    assert state.q.imag > 0
    lower = stieltjes_fixed_point(0.3 - 0.5j, tau=-0.4)
    assert lower.q == pytest.approx(state.q.conjugate(), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(
    x=st.floats(-4.0, 4.0),
    y=st.floats(0.01, 5.0),
    tau=st.floats(-2.0, 0.0),
)
def test_fixed_point_residuals_are_small(x, y, tau):
    state = stieltjes_fixed_point(complex(x, y), tau)
    assert max(state.residuals()) < 1e-12
    assert state.q.imag > 0


def test_fixed_point_inside_support_raises():
    with pytest.raises(DomainError):
        stieltjes_fixed_point(0.0, tau=-1.0)


def test_density_matches_semicircle_at_minus_one():
    grid = np.linspace(-1.5, 1.5, 31)
    table = nu_density(grid, tau=-1.0)
    np.testing.assert_allclose(table.values, semicircle_density(grid), atol=1e-3)


def test_density_integrates_to_one():
    grid = np.linspace(-2.5, 2.5, 2001)
    table = nu_density(grid, tau=-0.5)
    assert table.integral() == pytest.approx(1.0, abs=2e-3)
    cdf = nu_cdf(table)
    assert cdf(-3.0) == 0.0
    assert cdf(3.0) == 1.0


def test_density_rejects_bad_eps():
    with pytest.raises(ParameterError):
        nu_density(np.zeros(3), tau=-1.0, eps=0.0)


def test_support_edges_at_minus_one():
    left, right = support_edges(-1.0)
    assert right == pytest.approx(1.632993, abs=5e-3)
    assert left == pytest.approx(-1.632993, abs=5e-3)


@pytest.mark.parametrize("tau", [-2.0, -0.5, 0.0])
def test_support_edges_bracket_the_mass(tau):
    left, right = support_edges(tau)
    assert left < 0 < right
    outside = nu_density(np.array([left - 0.1, right + 0.1]), tau)
    assert np.all(outside.values < 1e-3)


def test_support_edge_is_continuous():
    for tau in (-1.5, -1.0, -0.4):
        assert abs(support_edges(tau)[1] - support_edges(tau + 1e-3)[1]) < 0.05


def test_density_is_herglotz_across_tau():
    grid = np.linspace(-3.0, 3.0, 121)
    for tau in (-2.0, -1.0, -0.3, 0.0):
        assert np.all(nu_density(grid, tau).values >= 0.0)


@pytest.mark.parametrize("tau", [-1.0, -0.75, -0.5, -0.25, 0.0])
def test_support_edge_is_positive(tau):
    assert support_right_edge(tau) > 0.5


@pytest.mark.parametrize("tau", [0.25, 0.5, 1.0, math.nan])
def test_positive_tau_is_rejected(tau):
    with pytest.raises(ParameterError):
        stieltjes_fixed_point(0.01j, tau)
    with pytest.raises(ParameterError):
        nu_density(np.linspace(-1.0, 1.0, 5), tau)
    with pytest.raises(ParameterError):
        support_right_edge(tau)


def test_uncoupled_law_has_an_atom_at_zero():
    # tau = 0: one block against two uncoupled blocks, a p x 2p Gaussian
    assert support_right_edge(0.0) == pytest.approx((1 + math.sqrt(2)) / math.sqrt(3), abs=5e-3)
    grid = np.linspace(-2.0, 2.0, 4000)
    assert 0.0 not in grid
    assert nu_density(grid, tau=0.0).integral() == pytest.approx(2 / 3, abs=5e-3)
    y = 1e-4
    q = stieltjes_on_grid(np.zeros(1), 0.0, y)[0]
    assert q * 1j * y == pytest.approx(-1 / 3, abs=1e-3)


def test_fixed_point_iteration_cap():
    cfg = FixedPointConfig(max_iter=5, polish_after=10)
    with pytest.raises(ConvergenceError) as info:
        stieltjes_fixed_point(0.2 + 0.05j, -0.5, cfg)
    assert len(info.value.residuals) == 2


def test_fixed_point_polishes_early():
    state = stieltjes_fixed_point(0.3 + 0.02j, -0.5, FixedPointConfig(polish_after=1))
    assert max(state.residuals()) < 1e-12
    assert state.q.imag > 0
    reference = stieltjes_fixed_point(0.3 + 0.02j, -0.5)
    assert state.q == pytest.approx(reference.q, abs=1e-10)


def test_fixed_point_config_validation():
    with pytest.raises(ParameterError):
        FixedPointConfig(polish_after=0)
    with pytest.raises(ParameterError):
        FixedPointConfig(tol=0.0)
