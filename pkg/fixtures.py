"""JSON/CSV input and output: parse fixture files, make results JSON-safe, write atomically."""

from __future__ import annotations

import json
import logging
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
import pandas as pd

from toric.cones import Cone
from toric.errors import InputError, ToricError
from toric.fans import Fan
from toric.pointconfig import PointConfig
from toric.tolerance import DEFAULT_TOLERANCE, Tolerance

logger = logging.getLogger(__name__)

FIXTURES_DIR = Path(__file__).resolve().parent / "fixtures"
SIGNIFICANT_DIGITS = 17


# ---------------------------------------------------------------------------
# Reading
# ---------------------------------------------------------------------------


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(exc.strerror or str(exc), field=str(path)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {exc.lineno} column {exc.colno}: {exc.msg}", field=path.name) from None


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"expected a number, got {value!r}", field=where)
    if not math.isfinite(value):
        raise InputError("numbers must be finite", field=where)
    return float(value)


def _vector(value: Any, where: str, width: int | None = None) -> list[float]:
    if not isinstance(value, list):
        raise InputError(f"expected a list of numbers, got {type(value).__name__}", field=where)
    vec = [_number(x, f"{where}[{i}]") for i, x in enumerate(value)]
    if width is not None and len(vec) != width:
        raise InputError(f"expected {width} coordinates, got {len(vec)}", field=where)
    return vec


def parse_config(data: Any, *, tol: Tolerance = DEFAULT_TOLERANCE) -> PointConfig:
    """{"points": {"label": [x, ...], ...}, "affine": bool}"""
    if not isinstance(data, dict):
        raise InputError("expected a JSON object", field="config")
    points = data.get("points")
    if not isinstance(points, dict) or not points:
        raise InputError("expected a nonempty object of labelled points", field="points")
    affine = data.get("affine")
    if affine is not None and not isinstance(affine, bool):
        raise InputError(f"expected true or false, got {affine!r}", field="affine")
    width = None
    coords: dict[str, list[float]] = {}
    for label, value in points.items():
        vec = _vector(value, f"points.{label}", width)
        width = len(vec)
        coords[label] = vec
    return PointConfig.from_mapping(coords, affine=affine, tol=tol)


def parse_fan(data: Any, *, tol: Tolerance = DEFAULT_TOLERANCE) -> Fan:
    """{"dim": n, "lineality": [[...]], "cones": [{"label": str, "generators": [[...], ...]}, ...]}

    Faces are closed over automatically; ``lineality`` rows are added to every cone.
    """
    if not isinstance(data, dict):
        raise InputError("expected a JSON object", field="fan")
    cones = data.get("cones")
    if not isinstance(cones, list) or not cones:
        raise InputError("expected a nonempty list of cones", field="cones")
    dim = data.get("dim")
    if dim is not None and (isinstance(dim, bool) or not isinstance(dim, int) or dim < 0):
        raise InputError(f"expected a nonnegative integer, got {dim!r}", field="dim")
    if dim is None:
        for entry in cones:
            gens = entry.get("generators") if isinstance(entry, dict) else None
            if isinstance(gens, list) and gens and isinstance(gens[0], list):
                dim = len(gens[0])
                break
        else:
            raise InputError("no generators to infer the dimension from; give dim", field="dim")

    lineality = [_vector(row, f"lineality[{i}]", dim) for i, row in enumerate(data.get("lineality") or [])]
    extra = [row for vec in lineality for row in (vec, [-x for x in vec])]

    parsed: list[Cone] = []
    labels: list[str] = []
    for i, entry in enumerate(cones):
        where = f"cones[{i}]"
        if not isinstance(entry, dict):
            raise InputError("expected an object with generators", field=where)
        gens = entry.get("generators", [])
        if not isinstance(gens, list):
            raise InputError("expected a list of vectors", field=f"{where}.generators")
        rows = [_vector(g, f"{where}.generators[{j}]", dim) for j, g in enumerate(gens)] + extra
        try:
            parsed.append(Cone(np.array(rows, dtype=float).reshape(-1, dim), dim, tol=tol))
        except ToricError as exc:
            raise InputError(str(exc), field=where) from None
        labels.append(str(entry.get("label", f"c{i}")))
    if len(set(labels)) != len(labels):
        raise InputError("cone labels must be unique", field="cones")
    return Fan(parsed, labels=labels, tol=tol).validate()


def parse_values(data: Any, labels: Sequence[str], *, field: str) -> np.ndarray:
    """A {"label": value} object (or a plain list in label order) as a vector."""
    if isinstance(data, list):
        vec = _vector(data, field, len(labels))
        return np.array(vec)
    if not isinstance(data, dict):
        raise InputError("expected an object keyed by label", field=field)
    missing = [label for label in labels if label not in data]
    if missing:
        raise InputError(f"missing values for {missing}", field=field)
    extra = sorted(set(data) - set(labels))
    if extra:
        raise InputError(f"unknown labels {extra}", field=field)
    return np.array([_number(data[label], f"{field}.{label}") for label in labels])


def parse_point(data: Any, width: int, *, field: str) -> np.ndarray:
    return np.array(_vector(data, field, width))


def parse_vector(text: str, *, field: str) -> np.ndarray:
    """Comma-separated numbers, e.g. ``0,-1,0``."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise InputError("expected comma-separated numbers", field=field)
    try:
        vec = np.array([float(p) for p in parts])
    except ValueError:
        raise InputError(f"{text!r} is not a list of numbers", field=field) from None
    if not np.all(np.isfinite(vec)):
        raise InputError("numbers must be finite", field=field)
    return vec


def parse_schedule(text: str) -> list[float]:
    """``start:end:step`` with the end included, or comma-separated values."""
    if ":" not in text:
        return parse_vector(text, field="schedule").tolist()
    pieces = text.split(":")
    if len(pieces) != 3:
        raise InputError(f"expected start:end:step, got {text!r}", field="schedule")
    try:
        start, end, step = (float(p) for p in pieces)
    except ValueError:
        raise InputError(f"expected start:end:step, got {text!r}", field="schedule") from None
    if step <= 0 or end < start:
        raise InputError("need step > 0 and end >= start", field="schedule")
    count = int(math.floor((end - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def load_config(path: str | Path, *, tol: Tolerance = DEFAULT_TOLERANCE) -> PointConfig:
    return parse_config(read_json(path), tol=tol)


def load_fan(path: str | Path, *, tol: Tolerance = DEFAULT_TOLERANCE) -> Fan:
    return parse_fan(read_json(path), tol=tol)


def load_values(path: str | Path, labels: Sequence[str], *, field: str) -> np.ndarray:
    return parse_values(read_json(path), labels, field=field)


def fixture_path(name: str) -> Path:
    return FIXTURES_DIR / (name if name.endswith(".json") else f"{name}.json")


# ---------------------------------------------------------------------------
# Writing
# ---------------------------------------------------------------------------


def json_safe(value: Any) -> Any:
    """Plain Python containers with NaN/inf replaced by None."""
    if isinstance(value, Mapping):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value, key=str) if isinstance(value, (set, frozenset)) else value
        return [json_safe(v) for v in items]
    if isinstance(value, np.ndarray):
        return json_safe(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if value is None or isinstance(value, str):
        return value
    if isinstance(value, Path):
        return str(value)
    return str(value)


def _encode(value: Any, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    close = "\n" + " " * (indent * level)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in value.items()]
        return "{" + pad + ("," + pad).join(items) + close + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in value):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in value) + "]"
        return "[" + pad + ("," + pad).join(_encode(v, indent, level + 1) for v in value) + close + "]"
    if isinstance(value, float):
        text = format(value, f".{SIGNIFICANT_DIGITS}g")
        return text if any(c in text for c in ".e") else text + ".0"
    return json.dumps(value)


def dumps(payload: Any, *, indent: int = 2) -> str:
    """Deterministic JSON text; floats carry 17 significant digits."""
    return _encode(json_safe(payload), indent, 0) + "\n"


def write_atomic(path: str | Path, text: str) -> Path:
    """Write through a temporary file in the same directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    logger.debug("wrote %s", path)
    return path


def write_json(path: str | Path, payload: Any) -> Path:
    return write_atomic(path, dumps(payload))


def write_csv(path: str | Path, frame: pd.DataFrame) -> Path:
    return write_atomic(path, frame.to_csv(index=False, float_format=f"%.{SIGNIFICANT_DIGITS}g"))
