"""File formats: JSON with 17 significant digits, and CSV with ``#`` metadata lines."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from .exceptions import InvalidInputError


def _float_token(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," + pad if indent else ", "
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float_token(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = (json.dumps(str(k)) + ": " + _encode(v, indent, level + 1) for k, v in obj.items())
        return "{" + pad + sep.join(items) + end + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # keep numeric rows such as [t, ratio] on one line
        if all(not isinstance(v, (Mapping, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, 0, 0) for v in obj) + "]"
        return "[" + pad + sep.join(_encode(v, indent, level + 1) for v in obj) + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps_json(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON; floats carry 17 significant digits, non-finite floats
    become the strings ``"inf"``, ``"-inf"`` and ``"nan"``."""
    return _encode(obj, indent, 0) + "\n"


def _restore(obj):
    if isinstance(obj, dict):
        return {k: _restore(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_restore(v) for v in obj]
    if obj in ("inf", "-inf", "nan"):
        return float(obj)
    return obj


def loads_json(text: str) -> Any:
    try:
        return _restore(json.loads(text))
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"malformed JSON: {exc}") from exc


def write_json(path, obj: Any) -> None:
    Path(path).write_text(dumps_json(obj), encoding="utf-8")


def read_json(path) -> Any:
    return loads_json(Path(path).read_text(encoding="utf-8"))


def _meta_lines(meta: Mapping | None) -> list[str]:
    if not meta:
        return []
    return [f"# {k}={v}" for k, v in meta.items()]


def _read_rows(path) -> tuple[dict, list[str], list[list[str]]]:
    meta: dict[str, str] = {}
    lines = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key.strip()] = value.strip()
        elif line.strip():
            lines.append(line)
    if not lines:
        raise InvalidInputError(f"{path}: no CSV header")
    rows = list(csv.reader(lines))
    return meta, [h.strip() for h in rows[0]], rows[1:]


def write_sequence_csv(path, rows: Iterable, meta: Mapping | None = None) -> None:
    """CSV with header ``n,value``."""
    out = _meta_lines(meta) + ["n,value"]
    out += [f"{int(n)},{format(float(v), '.17g')}" for n, v in rows]
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def read_sequence_csv(path) -> list[tuple[int, float]]:
    """Rows of an ``n,value`` CSV; malformed content raises :class:`InvalidInputError`."""
    _, header, rows = _read_rows(path)
    if header != ["n", "value"]:
        raise InvalidInputError(f"{path}: expected header 'n,value', got {','.join(header)!r}")
    out = []
    for i, row in enumerate(rows, start=2):
        if len(row) != 2:
            raise InvalidInputError(f"{path}: row {i} has {len(row)} fields")
        try:
            out.append((int(row[0]), float(row[1])))
        except ValueError as exc:
            raise InvalidInputError(f"{path}: row {i}: {exc}") from exc
    return out


TRAJECTORY_COLUMNS = ["t", "E", "cumulative_dissipation"]


def write_trajectory_csv(path, times, energies, dissipation, meta: Mapping | None = None) -> None:
    out = _meta_lines(meta) + [",".join(TRAJECTORY_COLUMNS)]
    for t, e, d in zip(times, energies, dissipation):
        out.append(",".join(format(float(x), ".17g") for x in (t, e, d)))
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def read_trajectory_csv(path) -> tuple[dict, np.ndarray, np.ndarray, np.ndarray]:
    meta, header, rows = _read_rows(path)
    if header[:3] != TRAJECTORY_COLUMNS:
        raise InvalidInputError(f"{path}: expected header {','.join(TRAJECTORY_COLUMNS)}")
    try:
        data = np.array([[float(x) for x in r[:3]] for r in rows], dtype=float)
    except (ValueError, IndexError) as exc:
        raise InvalidInputError(f"{path}: malformed trajectory row: {exc}") from exc
    if data.size == 0:
        raise InvalidInputError(f"{path}: trajectory has no samples")
    return meta, data[:, 0], data[:, 1], data[:, 2]
