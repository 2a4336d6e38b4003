import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import polars as pl
from scipy.integrate import cumulative_trapezoid, trapezoid

from src.constant import DENSITY_COLUMNS
from src.exception import ConvergenceError, DomainError, NumericError, ParameterError
from src.rtt.fixed_point import HERGLOTZ_TOL, check_tau, fixed_point_residuals, newton_step

START_HEIGHT = 10.0
LEVELS_PER_DECADE = 8
START_SWEEPS = 200
NEWTON_MAX_ITER = 60
RESIDUAL_TOL = 1e-13

EDGE_EPS = 1e-6
EDGE_THRESHOLD = 1e-4
EDGE_GRID_STEP = 0.05
EDGE_GRID_EXTENT = 8.0
EDGE_REFINE_ROUNDS = 4
EDGE_REFINE_POINTS = 32


@dataclass(frozen=True, eq=False)
class DensityTable:
    grid: np.ndarray
    values: np.ndarray

    def integral(self) -> float:
        return float(trapezoid(self.values, self.grid))

    def cdf(self) -> np.ndarray:
        cum = cumulative_trapezoid(self.values, self.grid, initial=0.0)
        total = cum[-1] if cum[-1] > 0 else 1.0
        return cum / total

    def to_frame(self) -> pl.DataFrame:
        return pl.DataFrame({DENSITY_COLUMNS[0]: self.grid, DENSITY_COLUMNS[1]: self.values})


def nu_cdf(table: DensityTable):
    """Cumulative distribution function interpolated from a density table."""
    cum = table.cdf()

    def cdf(x):
        return np.interp(x, table.grid, cum, left=0.0, right=1.0)

    return cdf


def stieltjes_on_grid(x: np.ndarray, tau: float, eps: float) -> np.ndarray:
    """q(x + i eps) for every abscissa, by vertical continuation from Im z = 10.

    The fixed point is first iterated high in the upper half-plane, then followed
    down a geometric ladder of heights with Newton steps so every point stays on
    the Herglotz branch.
    """
    if eps <= 0:
        raise ParameterError(f"eps must be positive (specified: {eps})")
    tau = check_tau(tau)
    x = np.asarray(x, dtype=np.float64)
    decades = max(math.log10(START_HEIGHT / eps), 1.0)
    heights = np.geomspace(START_HEIGHT, eps, int(math.ceil(LEVELS_PER_DECADE * decades)) + 1)

    z = x + 1j * heights[0]
    a = b = -1.0 / (3.0 * z)
    for _ in range(START_SWEEPS):
        a = -1.0 / (3.0 * (2.0 * b + z))
        b = -1.0 / (3.0 * (a + z - tau * b))

    for height in heights:
        z = x + 1j * height
        converged = np.zeros(x.shape, dtype=bool)
        for _ in range(NEWTON_MAX_ITER):
            try:
                a, b, _ = newton_step(z, tau, a, b)
            except NumericError as e:
                raise ConvergenceError(f"{e} (tau={tau})") from e
            converged = np.maximum(*fixed_point_residuals(z, tau, a, b)) < RESIDUAL_TOL
            if np.all(converged):
                break
        if not np.all(converged):
            bad = x[~converged].ravel()[0]
            raise ConvergenceError(
                f"fixed point failed at x={bad:.6g} (height {height:.1e}, tau={tau})",
                residuals=float(bad),
            )

    q = a + 2.0 * b
    if np.any(q.imag < -HERGLOTZ_TOL):
        bad = x[q.imag < -HERGLOTZ_TOL].ravel()[0]
        raise DomainError(f"non-Herglotz branch at x={bad:.6g} (tau={tau})")
    return q


def nu_density(x_grid, tau: float, eps: float = EDGE_EPS) -> DensityTable:
    """Density (1/pi) Im q(x + i eps) of the second-step limiting law.

    At tau = 0 the law carries an atom of mass 1/3 at the origin, which a density
    table only sees through the grid point x = 0.
    """
    grid = np.asarray(x_grid, dtype=np.float64)
    q = stieltjes_on_grid(grid, tau, eps)
    values = np.clip(q.imag / np.pi, 0.0, None)
    return DensityTable(grid=grid, values=values)


def _edge_from_grid(grid: np.ndarray, values: np.ndarray, tau: float, side: int) -> float:
    above = np.flatnonzero(values >= EDGE_THRESHOLD)
    if above.size == 0:
        return 0.0
    if side > 0:
        inside, outside = grid[above[-1]], grid[min(above[-1] + 1, grid.size - 1)]
    else:
        inside, outside = grid[above[0]], grid[max(above[0] - 1, 0)]
    # multisection: each round evaluates a fine grid across the bracket
    for _ in range(EDGE_REFINE_ROUNDS):
        sub = np.linspace(inside, outside, EDGE_REFINE_POINTS)
        hits = np.flatnonzero(nu_density(sub, tau, EDGE_EPS).values >= EDGE_THRESHOLD)
        last = hits[-1] if hits.size else 0
        inside, outside = sub[last], sub[min(last + 1, EDGE_REFINE_POINTS - 1)]
    return float(outside)


@lru_cache(maxsize=512)
def support_edges(tau: float) -> tuple[float, float]:
    """(left, right) edges of supp(nu(tau)) from a coarse grid refined by multisection."""
    extent = EDGE_GRID_EXTENT
    while True:
        grid = np.arange(-extent, extent + 0.5 * EDGE_GRID_STEP, EDGE_GRID_STEP)
        values = nu_density(grid, tau, EDGE_EPS).values
        if values[0] < EDGE_THRESHOLD and values[-1] < EDGE_THRESHOLD:
            break
        extent *= 2.0
    right = max(_edge_from_grid(grid, values, tau, side=1), 0.0)
    left = min(_edge_from_grid(grid, values, tau, side=-1), 0.0)
    return left, right


def support_right_edge(tau: float) -> float:
    return support_edges(float(tau))[1]
