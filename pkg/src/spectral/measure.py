from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
import polars as pl
from scipy import stats

from src.constant import HISTOGRAM_COLUMNS, SPECTRUM_COLUMNS
from src.exception import DegenerateInputError, ParameterError, PoleError
from src.spectral.contraction_matrix import SymBlockMatrix
from src.spectral.jacobi import sym_eigvals

POLE_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    eigenvalues: np.ndarray
    source: str  # "N" or "M"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        eigenvalues = np.sort(np.asarray(self.eigenvalues, dtype=np.float64))
        eigenvalues.flags.writeable = False
        object.__setattr__(self, "eigenvalues", eigenvalues)

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def to_frame(self) -> pl.DataFrame:
        return pl.DataFrame(
            {
                SPECTRUM_COLUMNS[0]: np.arange(self.n),
                SPECTRUM_COLUMNS[1]: self.eigenvalues,
            }
        )


@dataclass(frozen=True, eq=False)
class Histogram:
    bin_center: np.ndarray
    density: np.ndarray
    width: float

    def integral(self) -> float:
        return float(np.sum(self.density) * self.width)

    def to_frame(self) -> pl.DataFrame:
        return pl.DataFrame(
            {
                HISTOGRAM_COLUMNS[0]: self.bin_center,
                HISTOGRAM_COLUMNS[1]: self.density,
            }
        )


def sym_eigenvalues(S: SymBlockMatrix, source: str = "N", **params) -> SpectrumResult:
    return SpectrumResult(sym_eigvals(S.entries), source=source, params=params)


def empirical_stieltjes(spec: SpectrumResult, z: complex) -> complex:
    """(1/n) sum_i 1 / (lambda_i - z)."""
    z = complex(z)
    diff = spec.eigenvalues - z
    scale = max(1.0, abs(z))
    if z.imag == 0.0 and np.any(np.abs(diff) <= POLE_TOL * scale):
        raise PoleError(f"z={z} coincides with an eigenvalue")
    return complex(np.mean(1.0 / diff))


def histogram(spec: SpectrumResult, bins: int) -> Histogram:
    """Equal-width density histogram over [min, max] of the spectrum."""
    if bins < 1:
        raise ParameterError(f"bins must be positive (specified: {bins})")
    if spec.n == 0:
        raise DegenerateInputError("empty spectrum")
    lo, hi = float(spec.eigenvalues[0]), float(spec.eigenvalues[-1])
    if hi == lo:
        return Histogram(np.array([lo]), np.array([1.0]), width=1.0)

    counts, edges = np.histogram(spec.eigenvalues, bins=bins, range=(lo, hi))
    width = (hi - lo) / bins
    density = counts / (spec.n * width)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return Histogram(centers, density, width=width)


def ks_distance(spec: SpectrumResult, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Kolmogorov-Smirnov distance between the empirical spectral CDF and `cdf`."""
    return float(stats.kstest(spec.eigenvalues, cdf).statistic)


def sup_deviation(hist: Histogram, density: Callable[[np.ndarray], np.ndarray]) -> float:
    return float(np.max(np.abs(hist.density - density(hist.bin_center))))
