import math
from dataclasses import dataclass

import numpy as np

from src.exception import ParameterError
from src.random_util import make_rng
from src.tensor.tensor3 import Tensor3, outer3

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class SpikedModel:
    """Rank-two spiked model  T = b1 x1*y1*z1 + b2 x2*y2*z2 + W / sqrt(3p).

    The two components share the same correlation `alpha` on every mode.
    """

    p: int
    beta1: float
    beta2: float
    alpha: float
    seed: int = 0
    noiseless: bool = False

    def __post_init__(self):
        if self.p < 2:
            raise ParameterError(f"p must be at least 2 (specified: {self.p})")
        if self.beta1 < 0 or self.beta2 < 0:
            raise ParameterError(
                f"SNRs must be non-negative (specified: {self.beta1}, {self.beta2})"
            )
        if not 0.0 <= self.alpha < 1.0:
            raise ParameterError(f"alpha must be in [0, 1) (specified: {self.alpha})")
        if self.seed < 0:
            raise ParameterError(f"seed must be non-negative (specified: {self.seed})")

    @property
    def n(self) -> int:
        return 3 * self.p

    @property
    def betas(self) -> tuple[float, float]:
        return (self.beta1, self.beta2)


@dataclass(frozen=True, eq=False)
class GroundTruth:
    x1: np.ndarray
    x2: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    z1: np.ndarray
    z2: np.ndarray
    noise: Tensor3

    @property
    def dim(self) -> int:
        return self.x1.shape[0]

    def components(self, mode: int) -> tuple[np.ndarray, np.ndarray]:
        match mode:
            case 1:
                return self.x1, self.x2
            case 2:
                return self.y1, self.y2
            case 3:
                return self.z1, self.z2
            case _:
                raise ParameterError(f"mode must be 1, 2 or 3 (specified: {mode})")

    def signal(self, betas: tuple[float, float]) -> Tensor3:
        return betas[0] * outer3(self.x1, self.y1, self.z1) + betas[1] * outer3(
            self.x2, self.y2, self.z2
        )


def correlated_pair(
    rng: np.random.Generator, p: int, alpha: float
) -> tuple[np.ndarray, np.ndarray]:
    """Two unit vectors whose inner product is exactly `alpha`."""
    g1 = rng.standard_normal(p)
    g2 = rng.standard_normal(p)
    x1 = g1 / np.linalg.norm(g1)
    g2 = g2 - (g2 @ x1) * x1
    g2 = g2 / np.linalg.norm(g2)
    x2 = alpha * x1 + math.sqrt(1.0 - alpha**2) * g2
    # remove rounding drift so <x1, x2> and ||x2|| hold to machine precision
    x2 = x2 / np.linalg.norm(x2)
    return x1, x2


def gen_spiked(model: SpikedModel) -> tuple[Tensor3, GroundTruth]:
    rng = make_rng(model.seed)
    x1, x2 = correlated_pair(rng, model.p, model.alpha)
    y1, y2 = correlated_pair(rng, model.p, model.alpha)
    z1, z2 = correlated_pair(rng, model.p, model.alpha)

    if model.noiseless:
        noise = Tensor3.zeros(model.p)
    else:
        noise = Tensor3(rng.standard_normal((model.p, model.p, model.p)))

    truth = GroundTruth(x1=x1, x2=x2, y1=y1, y2=y2, z1=z1, z2=z2, noise=noise)
    T = truth.signal(model.betas) + noise * (1.0 / math.sqrt(model.n))
    return T, truth
