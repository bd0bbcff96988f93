"""CSV / JSON writers with round-trip float formatting."""

from __future__ import annotations

import json
import math
import sys

import numpy as np


def format_value(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return ""
        return format(x, ".17g")
    return str(x)


def _to_builtin(obj):
    if isinstance(obj, dict):
        return {str(k): _to_builtin(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_builtin(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_to_builtin(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def render_csv(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(format_value(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def render_json(obj) -> str:
    # repr of a Python float is already the shortest round-trip form
    return json.dumps(_to_builtin(obj), indent=2) + "\n"


def flatten(report: dict, prefix: str = ""):
    """(key, value) pairs of a nested report, lists indexed as key_0, key_1..."""
    for key, value in report.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            yield from flatten(value, name + ".")
        elif isinstance(value, (list, tuple, np.ndarray)):
            for i, v in enumerate(value):
                if isinstance(v, dict):
                    yield from flatten(v, f"{name}_{i}.")
                else:
                    yield f"{name}_{i}", v
        else:
            yield name, value


def render_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return render_json(report)
    return render_csv(("key", "value"), flatten(report))


def emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
