"""Versioned CSV/JSON serialization of spectra and link results.

CSV layout: '#'-prefixed header lines carrying ``key = value`` pairs (the
resolved configuration echo, units explicit in the key names), then one
column-header line, then comma-separated data rows in full double
precision. JSON files carry the same payload as one object. Both formats
embed ``schema_version``; readers reject anything else.

Boundary units: ordinary frequencies in Hz/MHz and fields in V/m; angular
rad/s never crosses this module outward.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .doppler import ScanMode, Spectrum
from .errors import SchemaError
from .link import LinkResult

SCHEMA_VERSION = 1
TWO_PI = 2.0 * math.pi


def _fmt(x: float) -> str:
    """Shortest round-trip decimal form of a double."""
    return repr(float(x))


def _header_lines(kind: str, meta: dict) -> list[str]:
    lines = [f"# schema_version = {SCHEMA_VERSION}", f"# kind = {kind}"]
    for key, value in meta.items():
        if isinstance(value, float):
            value = _fmt(value)
        lines.append(f"# {key} = {value}")
    return lines


def spectrum_meta(spec: Spectrum) -> dict:
    drive = spec.drive
    meta = {
        "scan_mode": spec.scan_mode.value,
        "probe_rabi_mhz": drive.omega_p / TWO_PI / 1e6,
        "coupler_rabi_mhz": drive.omega_c / TWO_PI / 1e6,
        "mw_rabi_mhz": drive.omega_mw / TWO_PI / 1e6,
        "probe_detuning_mhz": drive.delta_p / TWO_PI / 1e6,
        "coupler_detuning_mhz": drive.delta_c / TWO_PI / 1e6,
        "mw_detuning_mhz": drive.delta_mw / TWO_PI / 1e6,
    }
    for key, value in spec.grid_meta.items():
        meta[key] = value
    if spec.warnings:
        meta["warnings"] = " | ".join(spec.warnings)
    return meta


def write_spectrum_csv(spec: Spectrum, path: str | Path) -> Path:
    path = Path(path)
    lines = _header_lines("spectrum", spectrum_meta(spec))
    lines.append("axis_hz,signal")
    for x, y in zip(spec.axis, spec.signal):
        lines.append(f"{_fmt(x / TWO_PI)},{_fmt(y)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_spectrum_json(spec: Spectrum, path: str | Path) -> Path:
    path = Path(path)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "spectrum",
        "meta": spectrum_meta(spec),
        "axis_hz": [float(x / TWO_PI) for x in spec.axis],
        "signal": [float(y) for y in spec.signal],
    }
    path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path


def link_meta(result: LinkResult, extra: dict | None = None) -> dict:
    meta = {
        "link_kind": result.kind,
        "n_samples": int(result.times.size),
        "mean_deviation": result.mean_deviation,
        "fidelity": result.fidelity,
        "calibration_e_carrier_v_per_m": result.calibration["e_carrier"],
        "calibration_rabi_ref_mhz": result.calibration["rabi_ref"] / TWO_PI / 1e6,
        "n_failures": len(result.failures),
    }
    if extra:
        meta.update(extra)
    return meta


def _link_columns(result: LinkResult):
    if result.kind == "fm":
        # detunings leave as ordinary frequency
        return ("t_s,transmitted_hz,received_hz,deviation",
                result.transmitted / TWO_PI, result.received / TWO_PI)
    return ("t_s,transmitted_m,received_m,deviation",
            result.transmitted, result.received)


def write_link_csv(result: LinkResult, path: str | Path,
                   extra_meta: dict | None = None) -> Path:
    path = Path(path)
    lines = _header_lines("link", link_meta(result, extra_meta))
    header, tx, rx = _link_columns(result)
    lines.append(header)
    for t, a, b, d in zip(result.times, tx, rx, result.deviation):
        lines.append(f"{_fmt(t)},{_fmt(a)},{_fmt(b)},{_fmt(d)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_link_json(result: LinkResult, path: str | Path,
                    extra_meta: dict | None = None) -> Path:
    path = Path(path)
    _, tx, rx = _link_columns(result)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "link",
        "meta": link_meta(result, extra_meta),
        "t_s": [float(t) for t in result.times],
        "transmitted": [float(v) for v in tx],
        "received": [float(v) for v in rx],
        "deviation": [float(v) for v in result.deviation],
        "failures": [{"sample": i, "error": msg} for i, msg in result.failures],
    }
    path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path


def read_csv(path: str | Path) -> dict:
    """Parse a rydrx CSV file into {meta, columns, data}; checks the schema."""
    path = Path(path)
    meta: dict = {}
    columns: list[str] = []
    rows: list[list[float]] = []
    for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
            continue
        if not columns:
            columns = [c.strip() for c in line.split(",")]
            continue
        try:
            rows.append([float(v) for v in line.split(",")])
        except ValueError as exc:
            raise SchemaError(f"{path}:{line_no}: bad data row: {exc}") from exc
    if meta.get("schema_version") != str(SCHEMA_VERSION):
        raise SchemaError(
            f"{path}: schema_version {meta.get('schema_version')!r} "
            f"unsupported (expected {SCHEMA_VERSION})")
    if not columns or not rows:
        raise SchemaError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    if data.shape[1] != len(columns):
        raise SchemaError(f"{path}: column count mismatch")
    return {"meta": meta, "columns": columns, "data": data}


def read_json(path: str | Path) -> dict:
    path = Path(path)
    payload = json.loads(path.read_text(encoding="utf-8"))
    if payload.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(
            f"{path}: schema_version {payload.get('schema_version')!r} "
            f"unsupported (expected {SCHEMA_VERSION})")
    return payload
