import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np
import polars as pl


def mkdir_if_not_exists(dir_path: Path):
    if not dir_path.exists():
        dir_path.mkdir(parents=True, exist_ok=True)


def write_frame(
    df: pl.DataFrame, path: str | Path, sort_by: list[str] | None = None
) -> Path:
    """Write a CSV with its header; rows sorted by key columns when given."""
    path = Path(path)
    mkdir_if_not_exists(path.parent)
    if sort_by:
        df = df.sort(sort_by, maintain_order=True)
    df.write_csv(path)
    return path


def _to_builtin(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_to_builtin)


def write_json_atomic(obj, path: str | Path) -> Path:
    path = Path(path)
    mkdir_if_not_exists(path.parent)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fp:
            fp.write(dumps_json(obj))
            fp.write("\n")
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.remove(tmp_name)
        raise
    return path


def read_json(path: str | Path):
    with open(path) as fp:
        return json.load(fp)


def sha256_file(path: str | Path, chunk_size: int = 1 << 20) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fp:
        while chunk := fp.read(chunk_size):
            h.update(chunk)
    return h.hexdigest()


def digest_files(paths: list[Path], root: Path) -> dict[str, str]:
    root = Path(root).resolve()
    return {
        str(Path(path).resolve().relative_to(root)): sha256_file(path)
        for path in sorted(paths, key=str)
    }
