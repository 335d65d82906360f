"""CSV/JSON writers. Every file carries the resolved config and a format version."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    return str(v)


def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating, float)):
        o = float(o)
        return o if math.isfinite(o) else None
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return _jsonable(o.tolist())
    if isinstance(o, complex):
        return [o.real, o.imag]
    return o


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True)


def write_json(path: Path, payload: dict, config: dict):
    doc = dict(payload)
    doc["format_version"] = FORMAT_VERSION
    doc["config"] = config
    Path(path).write_text(dumps(doc) + "\n", encoding="utf-8")


def write_table(path: Path, header: list, rows, config: dict, fmt_kind: str = "csv"):
    """CSV with two leading '#' metadata lines, or JSON with columns and rows."""
    path = Path(path)
    rows = [list(r) for r in rows]
    if fmt_kind == "json":
        write_json(path.with_suffix(".json"), dict(columns=header, rows=rows), config)
        return path.with_suffix(".json")
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(f"# format_version: {FORMAT_VERSION}\n")
        f.write("# config: " + json.dumps(_jsonable(config), sort_keys=True) + "\n")
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])
    return path


def read_table(path: Path):
    """Inverse of write_table for CSV: (config, header, rows as float arrays)."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    config = json.loads(lines[1][len("# config: "):])
    rows = list(csv.reader(lines[2:]))
    return config, rows[0], np.array([[float(v) for v in r] for r in rows[1:]])
