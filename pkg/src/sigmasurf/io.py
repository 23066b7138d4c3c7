"""Deterministic writers: CSV, OBJ and JSON with 17 significant digits."""
from __future__ import annotations

import json
import math

import numpy as np


def fmt(x) -> str:
    """Fixed float formatting used by every writer."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def write_csv(path, header, rows) -> None:
    """``rows`` is a 2-D array (or iterable of sequences) of numbers."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def write_obj(path, vertices: np.ndarray, shape: tuple, comment: str | None = None) -> None:
    """Vertices in row-major grid order and one quad face per grid cell."""
    nL, nR = shape
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        for v in vertices:
            fh.write("v " + " ".join(fmt(c) for c in v[:3]) + "\n")
        for i in range(nL - 1):
            for j in range(nR - 1):
                a = i * nR + j + 1
                fh.write(f"f {a} {a + nR} {a + nR + 1} {a + 1}\n")


def _dump(obj, indent, level) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_dump(str(k), indent, level + 1)}: {_dump(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(x, (dict, list, tuple, np.ndarray)) for x in seq):
            return "[" + ", ".join(_dump(x, indent, level + 1) for x in seq) + "]"
        return "[\n" + ",\n".join(pad + _dump(x, indent, level + 1) for x in seq) + "\n" + end + "]"
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return "null" if not math.isfinite(obj) else fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with keys in insertion order and floats at 17 significant digits."""
    return _dump(obj, indent, 0) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))
