import itertools
import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from src.exception import DimensionError, ParameterError
from src.random_util import make_rng
from src.tensor import (
    SpikedModel,
    Tensor3,
    contract1,
    contract2,
    contract3,
    dump_tensor,
    frobenius_inner,
    gen_spiked,
    load_tensor,
    mode1_matmul,
    mode_matmul,
    outer3,
    unfold,
)

P = 4


def _loop_contract1(T, v, mode):
    out = np.zeros((P, P))
    for i, j, k in itertools.product(range(P), repeat=3):
        idx = (i, j, k)
        rest = tuple(x for m, x in enumerate(idx, start=1) if m != mode)
        out[rest] += v[idx[mode - 1]] * T[idx]
    return out


def _loop_contract2(T, a, b, free_mode):
    out = np.zeros(P)
    for i, j, k in itertools.product(range(P), repeat=3):
        idx = (i, j, k)
        lo, hi = (x for m, x in enumerate(idx, start=1) if m != free_mode)
        out[idx[free_mode - 1]] += a[lo] * b[hi] * T[idx]
    return out


@pytest.mark.parametrize("mode", [1, 2, 3])
def test_contract1_matches_loops(small_tensor, rng, mode):
    v = rng.standard_normal(P)
    np.testing.assert_allclose(
        contract1(small_tensor, v, mode), _loop_contract1(small_tensor, v, mode), atol=1e-13
    )


@pytest.mark.parametrize("free_mode", [1, 2, 3])
def test_contract2_matches_loops(small_tensor, rng, free_mode):
    a, b = rng.standard_normal(P), rng.standard_normal(P)
    np.testing.assert_allclose(
        contract2(small_tensor, a, b, free_mode),
        _loop_contract2(small_tensor, a, b, free_mode),
        atol=1e-13,
    )


def test_contract3_matches_loops(small_tensor, rng):
    u, v, w = rng.standard_normal((3, P))
    expected = sum(
        u[i] * v[j] * w[k] * small_tensor[i, j, k]
        for i, j, k in itertools.product(range(P), repeat=3)
    )
    assert contract3(small_tensor, u, v, w) == pytest.approx(expected, abs=1e-13)


@pytest.mark.parametrize("mode", [1, 2, 3])
def test_mode_matmul_matches_loops(small_tensor, rng, mode):
    M = rng.standard_normal((P, P))
    expected = np.zeros((P, P, P))
    for i, j, k, a in itertools.product(range(P), repeat=4):
        idx = [i, j, k]
        src = list(idx)
        src[mode - 1] = a
        expected[i, j, k] += M[idx[mode - 1], a] * small_tensor[tuple(src)]
    np.testing.assert_allclose(mode_matmul(small_tensor, M, mode).entries, expected, atol=1e-13)


def test_mode1_matmul_identity(small_tensor):
    np.testing.assert_array_equal(mode1_matmul(small_tensor, np.eye(P)).entries, small_tensor.entries)


def test_unfold_layout(small_tensor):
    U = unfold(small_tensor, 1)
    assert U.shape == (P, P * P)
    assert U[1, 2 * P + 3] == small_tensor[1, 2, 3]
    assert unfold(small_tensor, 3)[3, 1 * P + 2] == small_tensor[1, 2, 3]


@settings(max_examples=30, deadline=None)
@given(
    a=st.floats(-10, 10, allow_nan=False),
    b=st.floats(-10, 10, allow_nan=False),
    mode=st.sampled_from([1, 2, 3]),
)
def test_contract1_is_linear(a, b, mode):
    rng = make_rng(5)
    T = Tensor3(rng.standard_normal((P, P, P)))
    x, y = rng.standard_normal((2, P))
    np.testing.assert_allclose(
        contract1(T, a * x + b * y, mode),
        a * contract1(T, x, mode) + b * contract1(T, y, mode),
        atol=1e-10,
    )


def test_outer3_norm_and_inner(rng):
    x, y, z = rng.standard_normal((3, 5))
    T = outer3(x, y, z)
    expected = np.linalg.norm(x) * np.linalg.norm(y) * np.linalg.norm(z)
    assert T.norm() == pytest.approx(expected, rel=1e-12)
    assert frobenius_inner(T, T) == pytest.approx(expected**2, rel=1e-12)


def test_tensor_validation():
    with pytest.raises(DimensionError):
        Tensor3(np.zeros((2, 3, 2)))
    with pytest.raises(DimensionError):
        Tensor3(np.zeros((2, 2)))
    with pytest.raises(ParameterError):
        Tensor3(np.full((2, 2, 2), np.nan))
    with pytest.raises(DimensionError):
        contract1(Tensor3.zeros(3), np.ones(4), 1)


def test_tensor_is_read_only(small_tensor):
    with pytest.raises(ValueError):
        small_tensor.entries[0, 0, 0] = 1.0


@pytest.mark.parametrize("alpha", [0.0, 0.5, 0.9])
def test_gen_spiked_components(alpha):
    model = SpikedModel(p=20, beta1=3.0, beta2=2.0, alpha=alpha, seed=3)
    T, truth = gen_spiked(model)
    for mode in (1, 2, 3):
        c1, c2 = truth.components(mode)
        assert np.linalg.norm(c1) == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.norm(c2) == pytest.approx(1.0, abs=1e-12)
        assert c1 @ c2 == pytest.approx(alpha, abs=1e-12)
    residual = T - truth.signal(model.betas)
    np.testing.assert_allclose(residual.entries, truth.noise.entries / math.sqrt(model.n), atol=1e-12)


def test_gen_spiked_is_deterministic():
    model = SpikedModel(p=8, beta1=3.0, beta2=2.0, alpha=0.3, seed=42)
    T1, _ = gen_spiked(model)
    T2, _ = gen_spiked(model)
    T3, _ = gen_spiked(SpikedModel(p=8, beta1=3.0, beta2=2.0, alpha=0.3, seed=43))
    np.testing.assert_array_equal(T1.entries, T2.entries)
    assert not np.array_equal(T1.entries, T3.entries)


def test_gen_spiked_noiseless():
    model = SpikedModel(p=6, beta1=3.0, beta2=2.0, alpha=0.5, seed=0, noiseless=True)
    T, truth = gen_spiked(model)
    np.testing.assert_allclose(T.entries, truth.signal(model.betas).entries, atol=1e-15)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(p=1, beta1=1.0, beta2=1.0, alpha=0.0),
        dict(p=5, beta1=-1.0, beta2=1.0, alpha=0.0),
        dict(p=5, beta1=1.0, beta2=1.0, alpha=1.0),
        dict(p=5, beta1=1.0, beta2=1.0, alpha=0.0, seed=-1),
    ],
)
def test_spiked_model_validation(kwargs):
    with pytest.raises(ParameterError):
        SpikedModel(**kwargs)


def test_dump_and_load_tensor(tmp_path, small_tensor):
    path = tmp_path / "tensor.csv"
    dump_tensor(small_tensor, path)
    loaded = load_tensor(path)
    assert loaded.dim == P
    np.testing.assert_allclose(loaded.entries, small_tensor.entries, rtol=0, atol=1e-15)


def test_load_tensor_with_wrong_size(tmp_path):
    path = tmp_path / "broken.csv"
    path.write_text("p\n2\n1.0\n2.0\n")
    with pytest.raises(DimensionError):
        load_tensor(path)


def test_tensor_file_layout(tmp_path, small_tensor):
    path = tmp_path / "tensor.csv"
    dump_tensor(small_tensor, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "p"
    assert len(lines) == 1 + P**3
    assert float(lines[1]) == pytest.approx(small_tensor[0, 0, 0], abs=1e-15)
    assert float(lines[2]) == pytest.approx(small_tensor[0, 0, 1], abs=1e-15)
    assert float(lines[1 + P]) == pytest.approx(small_tensor[0, 1, 0], abs=1e-15)


def test_load_empty_tensor_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("p\n")
    with pytest.raises(DimensionError):
        load_tensor(path)


def test_pure_noise_energy():
    p = 20
    energies = [
        gen_spiked(SpikedModel(p=p, beta1=0.0, beta2=0.0, alpha=0.0, seed=seed))[0].norm() ** 2
        for seed in range(50)
    ]
    assert np.mean(energies) == pytest.approx(p**2 / 3, rel=0.05)
