from dataclasses import dataclass

import numpy as np
from einops import einsum, rearrange

from src.exception import DimensionError, ParameterError

# index order of the flat layout: row-major (C order), k fastest
FLAT_ORDER = "C"

_CONTRACT1 = {
    1: "i j k, i -> j k",
    2: "i j k, j -> i k",
    3: "i j k, k -> i j",
}
_CONTRACT2 = {
    1: "i j k, j, k -> i",
    2: "i j k, i, k -> j",
    3: "i j k, i, j -> k",
}
_MODE_MATMUL = {
    1: "a i, i j k -> a j k",
    2: "b j, i j k -> i b k",
    3: "c k, i j k -> i j c",
}
_UNFOLD = {
    1: "i j k -> i (j k)",
    2: "i j k -> j (i k)",
    3: "i j k -> k (i j)",
}


@dataclass(frozen=True, eq=False)
class Tensor3:
    """Dense cubic order-3 tensor T[i, j, k] of dimension p (immutable)."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.float64, order=FLAT_ORDER)
        if entries.ndim != 3:
            raise DimensionError(f"expected an order-3 array, got ndim={entries.ndim}")
        p = entries.shape[0]
        if p < 1 or entries.shape != (p, p, p):
            raise DimensionError(f"expected a cubic p x p x p array, got {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise ParameterError("tensor entries must be finite")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, index: tuple[int, int, int]) -> float:
        return float(self.entries[index])

    def __add__(self, other: "Tensor3") -> "Tensor3":
        _check_same_dim(self, other)
        return Tensor3(self.entries + other.entries)

    def __sub__(self, other: "Tensor3") -> "Tensor3":
        _check_same_dim(self, other)
        return Tensor3(self.entries - other.entries)

    def __mul__(self, scalar: float) -> "Tensor3":
        return Tensor3(float(scalar) * self.entries)

    __rmul__ = __mul__

    def flat(self) -> np.ndarray:
        return self.entries.reshape(-1, order=FLAT_ORDER)

    @classmethod
    def from_flat(cls, p: int, values: np.ndarray) -> "Tensor3":
        values = np.asarray(values, dtype=np.float64)
        if values.size != p**3:
            raise DimensionError(f"expected {p**3} entries for p={p}, got {values.size}")
        return cls(values.reshape((p, p, p), order=FLAT_ORDER))

    @classmethod
    def zeros(cls, p: int) -> "Tensor3":
        return cls(np.zeros((p, p, p)))

    def norm(self) -> float:
        return frobenius_norm(self)

    def __repr__(self):
        return f"{self.__class__.__name__}(dim={self.dim}, norm={self.norm():.4g})"


def _check_same_dim(a: Tensor3, b: Tensor3):
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} != {b.dim}")


def _check_mode(mode: int):
    if mode not in (1, 2, 3):
        raise ParameterError(f"mode must be 1, 2 or 3 (specified: {mode})")


def as_vector(x, dim: int | None = None, name: str = "vector") -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionError(f"{name} must be one-dimensional, got shape {x.shape}")
    if dim is not None and x.shape[0] != dim:
        raise DimensionError(f"{name} has length {x.shape[0]}, expected {dim}")
    return x


def outer3(x, y, z) -> Tensor3:
    x = as_vector(x, name="x")
    y = as_vector(y, x.shape[0], name="y")
    z = as_vector(z, x.shape[0], name="z")
    return Tensor3(einsum(x, y, z, "i, j, k -> i j k"))


def contract1(T: Tensor3, v, mode: int) -> np.ndarray:
    """Single-vector contraction, e.g. mode 1: out[j, k] = sum_i v_i T[i, j, k]."""
    _check_mode(mode)
    v = as_vector(v, T.dim)
    return einsum(T.entries, v, _CONTRACT1[mode])


def contract2(T: Tensor3, a, b, free_mode: int) -> np.ndarray:
    """Two-vector contraction leaving `free_mode` open.

    `a` contracts the lower of the two remaining modes, `b` the higher one,
    e.g. free_mode=3: out[k] = sum_ij a_i b_j T[i, j, k].
    """
    _check_mode(free_mode)
    a = as_vector(a, T.dim, name="a")
    b = as_vector(b, T.dim, name="b")
    return einsum(T.entries, a, b, _CONTRACT2[free_mode])


def contract3(T: Tensor3, u, v, w) -> float:
    u = as_vector(u, T.dim, name="u")
    v = as_vector(v, T.dim, name="v")
    w = as_vector(w, T.dim, name="w")
    return float(einsum(T.entries, u, v, w, "i j k, i, j, k ->"))


def mode_matmul(T: Tensor3, M: np.ndarray, mode: int) -> Tensor3:
    """T x_mode M, e.g. mode 1: out[i, j, k] = sum_i' M[i, i'] T[i', j, k]."""
    _check_mode(mode)
    M = np.asarray(M, dtype=np.float64)
    if M.shape != (T.dim, T.dim):
        raise DimensionError(f"expected a {T.dim} x {T.dim} matrix, got {M.shape}")
    return Tensor3(einsum(M, T.entries, _MODE_MATMUL[mode]))


def mode1_matmul(T: Tensor3, M: np.ndarray) -> Tensor3:
    return mode_matmul(T, M, mode=1)


def projector(u, gamma: float) -> np.ndarray:
    """I - gamma * u u^T."""
    u = as_vector(u, name="u")
    return np.eye(u.shape[0]) - gamma * np.outer(u, u)


def unfold(T: Tensor3, mode: int) -> np.ndarray:
    """Mode-n unfolding, a p x p^2 matrix."""
    _check_mode(mode)
    return rearrange(T.entries, _UNFOLD[mode])


def frobenius_inner(A: Tensor3, B: Tensor3) -> float:
    _check_same_dim(A, B)
    return float(einsum(A.entries, B.entries, "i j k, i j k ->"))


def frobenius_norm(T: Tensor3) -> float:
    return float(np.linalg.norm(T.flat()))
