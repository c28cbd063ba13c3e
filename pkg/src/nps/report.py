"""Deterministic JSON and CSV emission.

Floats are written with 17 significant digits, keys keep insertion order
and no timestamps are included, so equal inputs give equal bytes.
"""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

SCHEMA = 1
PROVENANCE = ("computed", "reference", "oracle")


def _float(x):
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    if x == 0.0:
        return "0.0"
    text = format(x, ".17g")
    return text if any(ch in text for ch in ".en") else text + ".0"


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, tuple):
        return list(obj)
    return obj


def dumps(obj, indent=2, _level=0):
    """Serialize ``obj`` to JSON text with fixed-precision floats."""
    obj = _plain(obj)
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(_plain(v), (int, float)) and not isinstance(_plain(v), bool) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def entry(value, provenance="computed"):
    if provenance not in PROVENANCE:
        raise ValueError(f"provenance must be one of {PROVENANCE}")
    return {"value": value, "provenance": provenance}


def build_report(command, version, config, results, ok=True):
    """Wrap results; bare values are tagged as computed."""
    tagged = {}
    for key, val in results.items():
        if isinstance(val, dict) and set(val) == {"value", "provenance"}:
            tagged[key] = val
        else:
            tagged[key] = entry(val)
    return {"schema": SCHEMA, "tool": "nps", "version": version, "command": command,
            "config": config, "ok": bool(ok), "results": tagged}


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_float(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()
