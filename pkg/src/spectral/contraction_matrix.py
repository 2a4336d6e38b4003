import math
from dataclasses import dataclass

import numpy as np

from src.exception import DimensionError
from src.tensor import Tensor3, as_vector, contract1


@dataclass(frozen=True, eq=False)
class SymBlockMatrix:
    """3x3 block symmetric matrix with zero p x p diagonal blocks, size n = 3p."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.float64)
        n = entries.shape[0]
        if entries.ndim != 2 or entries.shape != (n, n) or n % 3 != 0:
            raise DimensionError(f"expected a 3p x 3p matrix, got {entries.shape}")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def p(self) -> int:
        return self.n // 3

    def block(self, row: int, col: int) -> np.ndarray:
        p = self.p
        return self.entries[row * p : (row + 1) * p, col * p : (col + 1) * p]


def assemble_blocks(A12: np.ndarray, A13: np.ndarray, A23: np.ndarray) -> SymBlockMatrix:
    p = A12.shape[0]
    zero = np.zeros((p, p))
    entries = np.block(
        [
            [zero, A12, A13],
            [A12.T, zero, A23],
            [A13.T, A23.T, zero],
        ]
    )
    return SymBlockMatrix(entries / math.sqrt(3 * p))


def build_N(W: Tensor3, u, v, w) -> SymBlockMatrix:
    """Contraction matrix of a rank-one factor (u, v, w), scaled by 1/sqrt(3p)."""
    u = as_vector(u, W.dim, name="u")
    v = as_vector(v, W.dim, name="v")
    w = as_vector(w, W.dim, name="w")
    return assemble_blocks(
        contract1(W, w, mode=3),
        contract1(W, v, mode=2),
        contract1(W, u, mode=1),
    )


def build_M(W: Tensor3, u1, u2, v2, w2, gamma: float) -> SymBlockMatrix:
    """Second-step contraction matrix: the mode-1 slot uses u2 - gamma <u1, u2> u1."""
    u1 = as_vector(u1, W.dim, name="u1")
    u2 = as_vector(u2, W.dim, name="u2")
    kappa = float(u1 @ u2)
    return build_N(W, u2 - gamma * kappa * u1, v2, w2)
