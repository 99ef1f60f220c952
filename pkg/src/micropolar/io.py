"""CSV, JSON, manifest and snapshot files.

CSV: comma separated, one header row, LF line endings, floats written with
17 significant digits so that they round-trip bit for bit.

Snapshots: a JSON header ``<name>.json`` next to one raw binary per field
(``<name>.<field>.bin``, little-endian float64, row-major physical samples).
"""
import csv
import datetime
import json
import math
import os

import numpy as np

from . import __version__
from .errors import ConfigurationError
from .spectral import ScalarField, SpectralState, TorusGrid, to_physical

MANIFEST = "manifest.json"


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ConfigurationError(f"row has {len(row)} values, header has {len(header)}")
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path):
    """``(header, {column: float array})``; raises on malformed input."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigurationError(f"cannot read CSV {path}: {exc}") from exc
    if not rows or not rows[0]:
        raise ConfigurationError(f"malformed CSV {path}: no header row")
    header = rows[0]
    if len(set(header)) != len(header):
        raise ConfigurationError(f"malformed CSV {path}: duplicate column names")
    data = [[] for _ in header]
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ConfigurationError(f"malformed CSV {path}: line {lineno} has {len(row)} fields, expected {len(header)}")
        for j, v in enumerate(row):
            try:
                data[j].append(float(v))
            except ValueError:
                raise ConfigurationError(f"malformed CSV {path}: line {lineno} column {header[j]!r} is not a number") from None
    return header, {h: np.asarray(col, dtype=float) for h, col in zip(header, data)}


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps_json(obj):
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_json(obj))
    return path


def write_report(path, obj):
    """A JSON report that points back at the run manifest."""
    body = dict(obj)
    body["manifest"] = MANIFEST
    return write_json(path, body)


def write_manifest(directory, command, config, checks, outputs, validity=None, extra=None):
    """Manifest with config echo, version, per-check results; the only timestamped file."""
    body = {
        "command": command,
        "version": __version__,
        "config": config,
        "checks": checks,
        "all_passed": all(bool(c.get("passed")) for c in checks.values()),
        "outputs": sorted(os.path.basename(p) for p in outputs),
        "validity_window": validity,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
    }
    if extra:
        body.update(extra)
    return write_json(os.path.join(directory, MANIFEST), body)


def trajectory_rows(traj):
    from .diagnostics import DiagnosticsRecord

    return DiagnosticsRecord.columns(), [r.values() for r in traj.records]


def write_trajectory_csv(path, traj):
    header, rows = trajectory_rows(traj)
    return write_csv(path, header, rows)


def write_accumulators_csv(path, traj):
    from .diagnostics import ACCUMULATORS

    header = ["t"] + list(ACCUMULATORS)
    rows = [[t] + [acc[k] for k in ACCUMULATORS] for t, acc in zip(traj.times, traj.accumulators)]
    return write_csv(path, header, rows)


def write_snapshot(directory, name, state, t, params=None):
    """Write ``name.json`` plus ``name.omega.bin`` and ``name.h.bin``; returns all paths."""
    g = state.grid
    paths = []
    fields = {}
    for key, f in (("omega", state.omega_hat), ("h", state.h_hat)):
        fname = f"{name}.{key}.bin"
        arr = np.ascontiguousarray(to_physical(f), dtype="<f8")
        with open(os.path.join(directory, fname), "wb") as fh:
            fh.write(arr.tobytes(order="C"))
        fields[key] = fname
        paths.append(os.path.join(directory, fname))
    header = {
        "format": "micropolar-snapshot",
        "version": 1,
        "t": float(t),
        "n": g.n,
        "length": g.length,
        "dtype": "<f8",
        "order": "C",
        "layout": "physical",
        "fields": fields,
        "params": params.as_dict() if params is not None else None,
        "manifest": MANIFEST,
    }
    hpath = os.path.join(directory, f"{name}.json")
    write_json(hpath, header)
    return [hpath] + paths


def read_snapshot(header_path):
    """Inverse of :func:`write_snapshot`: ``(state, header)``."""
    with open(header_path, encoding="utf-8") as fh:
        header = json.load(fh)
    if header.get("format") != "micropolar-snapshot":
        raise ConfigurationError(f"{header_path} is not a snapshot header")
    n = int(header["n"])
    grid = TorusGrid(n, float(header["length"]))
    base = os.path.dirname(header_path)
    out = {}
    for key in ("omega", "h"):
        raw = np.fromfile(os.path.join(base, header["fields"][key]), dtype="<f8")
        if raw.size != n * n:
            raise ConfigurationError(f"snapshot field {key} has {raw.size} values, expected {n * n}")
        out[key] = ScalarField.from_physical(grid, raw.reshape(n, n))
    return SpectralState(out["omega"], out["h"]), header
