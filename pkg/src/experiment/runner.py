import sys
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from importlib.metadata import PackageNotFoundError, version
from multiprocessing import get_context
from pathlib import Path

import polars as pl
from omegaconf import DictConfig, OmegaConf
from tqdm import tqdm

from src.asymptotics import SolverConfig
from src.config import CommonConfig, SolverSettings, load_config
from src.exception import ConfigError, NumericError, ParameterError
from src.io_util import digest_files, write_json_atomic
from src.logger import BaseLogger
from src.proc_util import TIMINGS, reset_timings, trace
from src.rank_one import PowerIterConfig
from src.rtt import FixedPointConfig

PACKAGE_NAME = "tensor-deflation"
MANIFEST_NAME = "manifest.json"
LOG_NAME = "run.log"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


@dataclass
class JobOutput:
    files: list[Path] = field(default_factory=list)
    seeds: list[int] = field(default_factory=list)


@dataclass(frozen=True)
class RunManifest:
    command: str
    config: dict
    version: str
    seeds: list[int]
    wall_clock: float
    timings: dict[str, float]
    outputs: dict[str, str]  # relative path -> sha256

    def to_record(self) -> dict:
        return dict(
            command=self.command,
            config=self.config,
            version=self.version,
            seeds=self.seeds,
            wall_clock=self.wall_clock,
            timings=self.timings,
            outputs=self.outputs,
        )


@dataclass(frozen=True)
class Solvers:
    power: PowerIterConfig
    newton: SolverConfig
    fixed_point: FixedPointConfig
    density_eps: float


def library_version() -> str:
    try:
        return version(PACKAGE_NAME)
    except PackageNotFoundError:
        return "unknown"


def make_solvers(settings: SolverSettings) -> Solvers:
    newton = settings.newton
    fp = settings.fixed_point
    return Solvers(
        power=PowerIterConfig(tol=settings.power.tol, max_iter=settings.power.max_iter),
        newton=SolverConfig(
            tol=newton.tol,
            max_iter=newton.max_iter,
            damping=newton.damping,
            max_halvings=newton.max_halvings,
            outer_max_iter=newton.outer_max_iter,
            joint_tol=newton.joint_tol,
        ),
        fixed_point=FixedPointConfig(
            tol=fp.tol, max_iter=fp.max_iter, polish_after=fp.polish_after
        ),
        density_eps=fp.density_eps,
    )


def fan_out(fn: Callable, tasks: Sequence, num_workers: int, desc: str = "") -> list:
    """Map `fn` over `tasks`, in a spawn pool when more than one worker is requested."""
    if num_workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tqdm(tasks, desc=desc)]
    with get_context("spawn").Pool(min(num_workers, len(tasks))) as pool:
        print(f"[INFO] Start {desc} with {num_workers} workers.")
        return list(tqdm(pool.imap(fn, tasks), total=len(tasks), desc=desc))


def log_failures(rows: list[dict], logger: BaseLogger, keys: Sequence[str]) -> list[dict]:
    """Move per-row `message` entries into the run log; rows keep their status."""
    cleaned = []
    for row in rows:
        row = dict(row)
        message = row.pop("message", None)
        if row.get("status", "ok") != "ok":
            logger.write_event(
                "trial", status=row["status"], **{k: row[k] for k in keys if k in row}, message=message
            )
        cleaned.append(row)
    return cleaned


def summarize(
    df: pl.DataFrame,
    keys: list[str],
    values: list[str],
    valid: tuple[str, ...] = ("ok",),
) -> pl.DataFrame:
    """Per-key mean/std over rows whose status is in `valid`, plus the count of all rows."""
    ok = df.filter(pl.col("status").is_in(list(valid)))
    stats = ok.group_by(keys, maintain_order=True).agg(
        [pl.col(v).mean().alias(f"{v}_mean") for v in values]
        + [pl.col(v).std().alias(f"{v}_std") for v in values]
        + [pl.len().alias("num_ok")]
    )
    counts = df.group_by(keys, maintain_order=True).agg(pl.len().alias("num_trials"))
    return counts.join(stats, on=keys, how="left").with_columns(
        pl.col("num_ok").fill_null(0)
    ).sort(keys)


def write_manifest(
    command: str, cfg: DictConfig, output: JobOutput, wall_clock: float, out_dir: Path
) -> Path:
    manifest = RunManifest(
        command=command,
        config=OmegaConf.to_container(cfg, resolve=True),
        version=library_version(),
        seeds=list(output.seeds),
        wall_clock=wall_clock,
        timings=dict(TIMINGS),
        outputs=digest_files(output.files, out_dir),
    )
    return write_json_atomic(manifest.to_record(), out_dir / MANIFEST_NAME)


def execute(
    command: str,
    cfg: DictConfig,
    schema: type,
    body: Callable[[CommonConfig, Path, BaseLogger], JobOutput],
    out_dir: Path | None = None,
) -> int:
    """Validate, run and record one command; returns the process exit code."""
    out_dir = Path.cwd() if out_dir is None else Path(out_dir)
    try:
        typed = load_config(cfg, schema)
    except ConfigError as e:
        print(f"[ERROR] invalid config: {e}", file=sys.stderr)
        return EXIT_CONFIG

    reset_timings()
    logger = BaseLogger(out_dir / LOG_NAME)
    logger.write_event("start", command=command, seed=typed.seed, scale=typed.scale.name)
    t0 = time.time()
    try:
        with trace(command):
            output = body(typed, out_dir, logger)
    except (ConfigError, ParameterError) as e:
        logger.write_event("error", kind=type(e).__name__, message=e)
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as e:
        logger.write_event("error", kind=type(e).__name__, message=e)
        print(f"[ERROR] {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC

    wall_clock = time.time() - t0
    path = write_manifest(command, cfg, output, wall_clock, out_dir)
    logger.write_event("done", outputs=len(output.files), wall_clock=wall_clock)
    print(f"[INFO] {command}: wrote {len(output.files)} files and {path.name} to {out_dir}")
    return EXIT_OK


def main_entry(command: str, schema: type, body: Callable) -> Callable[[DictConfig], None]:
    """Body of a hydra task function: exits with the command's status code."""

    def run(cfg: DictConfig):
        code = execute(command, cfg, schema, body)
        if code != EXIT_OK:
            sys.exit(code)

    return run


def frame_from_rows(rows: list[dict]) -> pl.DataFrame:
    return pl.from_dicts(rows, infer_schema_length=None)


def sweep_axis(df: pl.DataFrame, candidates: Sequence[str]) -> str:
    """First of `candidates` that takes more than one value (the chart abscissa)."""
    for name in candidates:
        if name in df.columns and df[name].n_unique() > 1:
            return name
    return candidates[0]
