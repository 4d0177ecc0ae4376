"""
CSV and JSON helpers shared by every artifact spectrafrac writes
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Mapping, Sequence, Tuple, Union

import numpy as np

FORMAT_VERSION = 1

PathLike = Union[str, Path]


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, float) and not np.isfinite(value):
        return "inf" if value > 0 else ("-inf" if value < 0 else "nan")
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def dumps_json(payload: Mapping[str, Any]) -> str:
    data = {"format": FORMAT_VERSION, **_jsonable(payload)}
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def write_json(path: PathLike, payload: Mapping[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_json(payload))
    return path


def read_json(path: PathLike) -> Dict[str, Any]:
    with open(path, "r") as f:
        return json.load(f)


def format_header(meta: Mapping[str, Any]) -> List[str]:
    return [f"{key}={_jsonable(value)}" for key, value in meta.items()]


def write_csv(
    path: PathLike,
    columns: Sequence[str],
    data: Union[np.ndarray, Sequence[Sequence[float]]],
    meta: Mapping[str, Any] = (),
) -> Path:
    """Write a numeric table; `meta` becomes `# key=value` lines above the column row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    array = np.asarray(data, dtype=float).reshape(-1, len(columns))
    header = "\n".join([f"format={FORMAT_VERSION}", *format_header(dict(meta)), ",".join(columns)])
    np.savetxt(path, array, fmt="%.17g", delimiter=",", header=header, comments="# ")
    return path


def read_csv(path: PathLike) -> Tuple[Dict[str, str], List[str], np.ndarray]:
    """Read a table written by `write_csv` (or any `#`-commented CSV with a column row)."""
    meta: Dict[str, str] = {}
    columns: List[str] = []
    with open(path, "r") as f:
        lines = f.read().splitlines()
    body = []
    for line in lines:
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            text = stripped.lstrip("#").strip()
            if "=" in text:
                key, _, value = text.partition("=")
                meta[key.strip()] = value.strip()
            elif text:
                columns = [c.strip() for c in text.split(",")]
            continue
        if not columns and not _is_numeric_row(stripped):
            columns = [c.strip() for c in stripped.split(",")]
            continue
        body.append([float(v) for v in stripped.split(",")])
    width = len(columns) if columns else (len(body[0]) if body else 0)
    return meta, columns, np.asarray(body, dtype=float).reshape(-1, width)


def _is_numeric_row(text: str) -> bool:
    try:
        [float(v) for v in text.split(",")]
    except ValueError:
        return False
    return True
