"""Curve snapshots (JSON) and diagnostics time series (CSV)."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .diagnostics import DiagRecord
from .errors import SnapshotFormatError
from .spectral_curve import PeriodicCurve

SNAPSHOT_VERSION = 1
DOMAINS = ("physical", "tilde")


class Snapshot:
    """A curve plus the time and domain it belongs to."""

    __slots__ = ("curve", "t", "domain", "branch_angle")

    def __init__(self, curve: PeriodicCurve, t: float = 0.0, domain: Optional[str] = None,
                 branch_angle: Optional[float] = None):
        if domain is None:
            domain = "physical" if curve.lift else "tilde"
        if domain not in DOMAINS:
            raise ValueError(f"domain must be one of {DOMAINS}")
        if (domain == "tilde") != (curve.lift == 0):
            raise ValueError("tilde snapshots hold closed curves, physical ones lifted curves")
        if domain == "tilde" and branch_angle is None:
            branch_angle = 0.0
        self.curve = curve
        self.t = float(t)
        self.domain = domain
        self.branch_angle = None if branch_angle is None else float(branch_angle)

    def to_dict(self) -> dict:
        d = {
            "version": SNAPSHOT_VERSION,
            "t": self.t,
            "domain": self.domain,
            "n_points": self.curve.n_points,
        }
        if self.branch_angle is not None:
            d["branch_angle"] = self.branch_angle
        d["p1"] = [float(v) for v in self.curve.p1]
        d["p2"] = [float(v) for v in self.curve.p2]
        return d


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, allow_nan=False) + "\n"


def save(path, curve_or_snapshot, t: float = 0.0, branch_angle: Optional[float] = None) -> Path:
    """Write a snapshot; floats use shortest round-trip repr, so reloads are exact."""
    snap = curve_or_snapshot
    if isinstance(snap, PeriodicCurve):
        snap = Snapshot(snap, t, branch_angle=branch_angle)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(_dump(snap.to_dict()))
    os.replace(tmp, path)
    return path


def _field(d: dict, key: str, path, kind):
    if key not in d:
        raise SnapshotFormatError(f"{path}: missing field {key!r}")
    val = d[key]
    if kind is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise SnapshotFormatError(f"{path}: field {key!r} must be a number")
        return float(val)
    if kind is int:
        if isinstance(val, bool) or not isinstance(val, int):
            raise SnapshotFormatError(f"{path}: field {key!r} must be an integer")
        return val
    if kind is list:
        if not isinstance(val, list):
            raise SnapshotFormatError(f"{path}: field {key!r} must be a list")
        for i, v in enumerate(val):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise SnapshotFormatError(f"{path}: field {key!r}[{i}] is not a number")
        return np.array(val, dtype=float)
    return val


def load(path) -> Snapshot:
    """Read a snapshot written by :func:`save`."""
    path = Path(path)
    text = path.read_text()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SnapshotFormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(d, dict):
        raise SnapshotFormatError(f"{path}: top level must be an object")
    version = _field(d, "version", path, int)
    if version != SNAPSHOT_VERSION:
        raise SnapshotFormatError(
            f"{path}: snapshot version {version}, this build reads {SNAPSHOT_VERSION}")
    domain = _field(d, "domain", path, str)
    if domain not in DOMAINS:
        raise SnapshotFormatError(f"{path}: field 'domain' must be one of {DOMAINS}")
    n = _field(d, "n_points", path, int)
    t = _field(d, "t", path, float)
    p1 = _field(d, "p1", path, list)
    p2 = _field(d, "p2", path, list)
    for key, arr in (("p1", p1), ("p2", p2)):
        if arr.shape != (n,):
            raise SnapshotFormatError(f"{path}: field {key!r} has {arr.size} values, n_points={n}")
    angle = None
    if "branch_angle" in d:
        angle = _field(d, "branch_angle", path, float)
    try:
        curve = PeriodicCurve(p1, p2, lift=1.0 if domain == "physical" else 0.0)
    except ValueError as exc:
        raise SnapshotFormatError(f"{path}: {exc}") from exc
    return Snapshot(curve, t, domain, angle)


class CSVWriter:
    """Diagnostics time series with a fixed header and ``%.17g`` floats."""

    def __init__(self, path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "w", newline="\n")
        self._fh.write(DiagRecord.csv_header() + "\n")

    def write(self, rec: DiagRecord) -> None:
        self._fh.write(rec.csv_row() + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_csv(path, records: Iterable[DiagRecord]) -> Path:
    with CSVWriter(path) as w:
        for r in records:
            w.write(r)
    return Path(path)


def read_csv(path) -> list[DiagRecord]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != DiagRecord.csv_header():
        raise SnapshotFormatError(f"{path}:1: unexpected header")
    out = []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 8:
            raise SnapshotFormatError(f"{path}:{i}: expected 8 columns, got {len(parts)}")
        try:
            out.append(DiagRecord(*(float(p) for p in parts)))
        except ValueError as exc:
            raise SnapshotFormatError(f"{path}:{i}: {exc}") from exc
    return out


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n")
    return path
