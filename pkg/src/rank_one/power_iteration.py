from dataclasses import dataclass

import numpy as np

from src.exception import ConvergenceError, DegenerateInputError, ParameterError
from src.random_util import make_rng, random_unit_vector
from src.spectral import leading_eigenvector
from src.tensor import Tensor3, as_vector, contract2, contract3, outer3, unfold

INIT_CHOICES = ("svd", "given", "random")


@dataclass(frozen=True, eq=False)
class RankOneFactor:
    lam: float
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    n_iter: int = 0

    def vectors(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.u, self.v, self.w


@dataclass(frozen=True)
class PowerIterConfig:
    tol: float = 1e-10
    max_iter: int = 1000
    init: str = "svd"  # svd, given or random
    vectors: tuple | None = None
    seed: int = 0

    def __post_init__(self):
        if self.tol <= 0:
            raise ParameterError(f"tol must be positive (specified: {self.tol})")
        if self.max_iter < 1:
            raise ParameterError(f"max_iter must be >= 1 (specified: {self.max_iter})")
        if self.init not in INIT_CHOICES:
            raise ParameterError(f"Unknown init: {self.init}")
        if self.init == "given" and self.vectors is None:
            raise ParameterError("init='given' requires initial vectors")


def _normalize(x: np.ndarray, what: str) -> np.ndarray:
    norm = float(np.linalg.norm(x))
    if norm == 0.0 or not np.isfinite(norm):
        raise DegenerateInputError(f"zero contraction while updating {what}")
    return x / norm


def svd_init(T: Tensor3) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Leading left singular vectors of the three unfoldings (via their Gram matrices)."""
    if T.norm() == 0.0:
        raise DegenerateInputError("cannot initialize from a zero tensor")
    vectors = []
    for mode in (1, 2, 3):
        U = unfold(T, mode)
        vectors.append(_normalize(leading_eigenvector(U @ U.T), f"mode {mode}"))
    return tuple(vectors)


def _initial_vectors(T: Tensor3, cfg: PowerIterConfig):
    match cfg.init:
        case "svd":
            return svd_init(T)
        case "given":
            return tuple(
                _normalize(as_vector(x, T.dim), "initial vector") for x in cfg.vectors
            )
        case "random":
            rng = make_rng(cfg.seed)
            return tuple(random_unit_vector(rng, T.dim) for _ in range(3))
        case _:
            raise ValueError(f"Unknown init: {cfg.init}")


def residuals(T: Tensor3, f: RankOneFactor) -> tuple[float, float, float]:
    r_u = np.linalg.norm(contract2(T, f.v, f.w, 1) - f.lam * f.u)
    r_v = np.linalg.norm(contract2(T, f.u, f.w, 2) - f.lam * f.v)
    r_w = np.linalg.norm(contract2(T, f.u, f.v, 3) - f.lam * f.w)
    return float(r_u), float(r_v), float(r_w)


def power_iteration(T: Tensor3, cfg: PowerIterConfig | None = None) -> RankOneFactor:
    """Best rank-one approximation by cyclic tensor power iteration.

    Each sweep updates u <- T(., v, w), v <- T(u, ., w), w <- T(u, v, .), normalized.
    Stops when the largest per-vector change of a sweep is below cfg.tol.
    """
    cfg = cfg or PowerIterConfig()
    if T.norm() == 0.0:
        raise DegenerateInputError("power iteration on a zero tensor")
    u, v, w = _initial_vectors(T, cfg)

    delta = np.inf
    for n_iter in range(1, cfg.max_iter + 1):
        u_new = _normalize(contract2(T, v, w, 1), "u")
        v_new = _normalize(contract2(T, u_new, w, 2), "v")
        w_new = _normalize(contract2(T, u_new, v_new, 3), "w")
        delta = max(
            np.linalg.norm(u_new - u),
            np.linalg.norm(v_new - v),
            np.linalg.norm(w_new - w),
        )
        u, v, w = u_new, v_new, w_new
        if delta < cfg.tol:
            break
    else:
        lam = contract3(T, u, v, w)
        raise ConvergenceError(
            f"power iteration did not converge in {cfg.max_iter} sweeps (last change {delta:.3e})",
            residuals=residuals(T, RankOneFactor(lam, u, v, w)),
        )

    lam = contract3(T, u, v, w)
    if lam < 0:
        u, lam = -u, -lam
    return RankOneFactor(lam=lam, u=u, v=v, w=w, n_iter=n_iter)


def rank_one_tensor(f: RankOneFactor) -> Tensor3:
    return f.lam * outer3(f.u, f.v, f.w)
