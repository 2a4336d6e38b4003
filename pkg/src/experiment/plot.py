from collections.abc import Sequence
from pathlib import Path

import numpy as np
import polars as pl


def _pyplot():
    # optional dependency
    import matplotlib

    matplotlib.use("Agg")
    # stable ids and no date stamp so reruns give identical files
    matplotlib.rcParams["svg.hashsalt"] = "tensor-deflation"
    import matplotlib.pyplot as plt

    return plt


def plot_overlay(
    bin_center: np.ndarray,
    density: np.ndarray,
    width: float,
    grid: np.ndarray,
    curve: np.ndarray,
    path: str | Path,
    title: str = "",
) -> Path:
    """Histogram bars with a limiting density drawn over them."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(bin_center, density, width=width, alpha=0.5, label="empirical")
    ax.plot(grid, curve, color="C3", label="limit")
    ax.set_xlabel("eigenvalue")
    ax.set_ylabel("density")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return Path(path)


def plot_curves(
    df: pl.DataFrame,
    x: str,
    ys: Sequence[str],
    path: str | Path,
    hue: str | None = None,
    title: str = "",
) -> Path:
    """Line chart of several columns against `x`, one line per `hue` value."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    groups = [df] if hue is None else df.partition_by(hue, maintain_order=True)
    for group in groups:
        label_prefix = "" if hue is None else f"{hue}={group[hue][0]:g} "
        frame = group.sort(x)
        for y in ys:
            ax.plot(frame[x].to_numpy(), frame[y].to_numpy(), marker=".", label=f"{label_prefix}{y}")
    ax.set_xlabel(x)
    ax.set_title(title)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return Path(path)
