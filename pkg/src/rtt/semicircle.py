import numpy as np

from src.constant import EDGE, EDGE_SQ
from src.exception import DomainError

_DENSITY_SCALE = 3.0 / (4.0 * np.pi)


def _sqrt_branch(z: np.ndarray) -> np.ndarray:
    # sqrt(z - e) * sqrt(z + e) with principal roots: ~z at infinity on both half-planes
    return np.sqrt(z - EDGE) * np.sqrt(z + EDGE)


def r_semicircle(z):
    """Stieltjes transform of the semicircle law with variance 2/3.

    r(z) = (3/4)(-z + sqrt(z^2 - 8/3)), evaluated as -2 / (z + sqrt(z^2 - 8/3))
    to avoid cancellation for large |z|. Real z must lie outside the open support.
    """
    zs = np.asarray(z, dtype=np.complex128)
    inside = (zs.imag == 0.0) & (np.abs(zs.real) < EDGE)
    if np.any(inside):
        bad = zs[inside].ravel()[0].real
        raise DomainError(
            f"r(z) is undefined on the real axis inside the bulk (z={bad:.6g}); use z + i*eps"
        )
    r = -(0.75 * EDGE_SQ) / (zs + _sqrt_branch(zs))
    if r.ndim == 0:
        return complex(r)
    return r


def r_real(x: float) -> float:
    return r_semicircle(float(x)).real


def f_r(z):
    return z + r_semicircle(z)


def h_r(z):
    return -1.0 / r_semicircle(z)


def semicircle_density(x):
    x = np.asarray(x, dtype=np.float64)
    values = _DENSITY_SCALE * np.sqrt(np.clip(EDGE_SQ - x**2, 0.0, None))
    if values.ndim == 0:
        return float(values)
    return values


def semicircle_cdf(x):
    x = np.clip(np.asarray(x, dtype=np.float64), -EDGE, EDGE)
    values = (
        0.5
        + x * np.sqrt(EDGE_SQ - x**2) / (np.pi * EDGE_SQ)
        + np.arcsin(x / EDGE) / np.pi
    )
    if values.ndim == 0:
        return float(values)
    return values
