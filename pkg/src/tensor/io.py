from pathlib import Path

import numpy as np
import polars as pl

from src.exception import DimensionError
from src.tensor.tensor3 import Tensor3

HEADER = "p"


def dump_tensor(T: Tensor3, path: str | Path):
    """Flat CSV: header line "p", then the p^3 entries one per line (row-major, k fastest)."""
    pl.DataFrame({HEADER: T.flat()}).write_csv(path, float_precision=17)


def load_tensor(path: str | Path) -> Tensor3:
    df = pl.read_csv(path, schema={HEADER: pl.Float64})
    values = df[HEADER].to_numpy()
    p = int(round(np.cbrt(values.size)))
    if p < 1 or p**3 != values.size:
        raise DimensionError(f"{values.size} entries in {path} do not form a p x p x p tensor")
    return Tensor3.from_flat(p, values)
