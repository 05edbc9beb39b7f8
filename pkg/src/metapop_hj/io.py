"""Config parsing and lossless CSV/JSON writers with matching readers."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .model import PARAM_KEYS, ModelParams

OPTION_KEYS = ("eps", "eps_list", "L", "n_pts", "format", "out")


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment. Values stay strings."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ValueError(f"config line {lineno}: empty key")
        if key in out:
            raise ValueError(f"config line {lineno}: duplicate key {key!r}")
        if key not in PARAM_KEYS and key not in OPTION_KEYS:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        out[key] = value
    return out


def parse_eps_list(text: str) -> list:
    vals = [float(s) for s in text.replace(" ", "").split(",") if s]
    if not vals:
        raise ValueError("eps list is empty")
    if any(v <= 0 for v in vals) or any(b >= a for a, b in zip(vals, vals[1:])):
        raise ValueError(f"eps list must be positive and strictly decreasing, got {vals}")
    return vals


def read_config(path) -> tuple:
    """Returns (ModelParams, options) with options typed."""
    raw = parse_config_text(Path(path).read_text())
    try:
        params = ModelParams.from_mapping(raw)
    except KeyError as exc:
        raise ValueError(str(exc.args[0])) from None
    opts = {}
    if "eps" in raw:
        opts["eps"] = float(raw["eps"])
    if "eps_list" in raw:
        opts["eps_list"] = parse_eps_list(raw["eps_list"])
    if "L" in raw:
        opts["L"] = float(raw["L"])
    if "n_pts" in raw:
        opts["n_pts"] = int(raw["n_pts"])
    for key in ("format", "out"):
        if key in raw:
            opts[key] = raw[key]
    return params, opts


def write_config(path, params: ModelParams, **options) -> None:
    lines = [f"{k} = {_fmt(getattr(params, k))}" for k in PARAM_KEYS]
    for k, v in options.items():
        if isinstance(v, (list, tuple)):
            v = ",".join(_fmt(x) for x in v)
        lines.append(f"{k} = {_fmt(v)}")
    Path(path).write_text("\n".join(lines) + "\n")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    try:
        return format(float(v), ".17g")
    except (TypeError, ValueError):
        return "" if v is None else str(v)


def _parse(s: str):
    if s == "":
        return None
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def write_csv(path, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def read_csv(path) -> tuple:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        columns = next(r)
        rows = [tuple(_parse(s) for s in row) for row in r]
    return columns, rows


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return obj.item()
    return obj


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())


def write_record(path, record: dict, fmt: str) -> None:
    """A flat or nested record as JSON, or as ``key,value`` CSV rows."""
    if fmt == "json":
        write_json(path, record)
    else:
        write_csv(path, ("key", "value"), sorted(_flatten(record).items()))


def _flatten(rec, prefix=""):
    out = {}
    for k, v in rec.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, (list, tuple)):
            out[key] = json.dumps(_jsonable(v))
        else:
            out[key] = v
    return out


def read_record(path) -> dict:
    path = Path(path)
    if path.suffix == ".json":
        return read_json(path)
    _, rows = read_csv(path)
    # list-valued fields are stored as JSON text
    return {k: json.loads(v) if isinstance(v, str) and v.startswith("[") else v
            for k, v in rows}


def write_table(path, columns, rows, fmt: str) -> None:
    if fmt == "json":
        write_json(path, {"columns": list(columns), "rows": [list(r) for r in rows]})
    else:
        write_csv(path, columns, rows)


def read_table(path) -> tuple:
    path = Path(path)
    if path.suffix == ".json":
        data = read_json(path)
        return data["columns"], [tuple(r) for r in data["rows"]]
    return read_csv(path)


def same_float(a, b) -> bool:
    """Equality that treats NaN as equal to NaN."""
    if isinstance(a, float) and isinstance(b, float) and math.isnan(a) and math.isnan(b):
        return True
    return a == b
