"""Run configuration: file format, defaults, and CLI override merging.

Config files are INI-style (sections of ``key = value`` lines) with units
embedded in key names. Unspecified fields fall back to the selected preset
(``receiver`` for link commands, ``experiment`` for plain spectroscopy).
Parse errors carry file/line context from configparser; value errors name
the offending section and key.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import presets
from .core import DriveState, LadderConfig
from .doppler import ScanMode
from .link import ScanSettings
from .modulation import (AmSignal, Arbitrary, Baseband, FmCosine, FmSignal,
                         Sinusoid, Square)

TWO_PI = 2.0 * math.pi

_LADDER_KEYS = {
    # key -> (LadderConfig field, scale to internal units)
    "gamma_e_mhz": ("gamma_e", TWO_PI * 1e6),
    "gamma_r_khz": ("gamma_r", TWO_PI * 1e3),
    "gamma_rp_khz": ("gamma_rp", TWO_PI * 1e3),
    "deph_probe_mhz": ("deph_probe", TWO_PI * 1e6),
    "deph_ryd_mhz": ("deph_ryd", TWO_PI * 1e6),
    "lambda_p_nm": ("lambda_p", 1e-9),
    "lambda_c_nm": ("lambda_c", 1e-9),
    "dipole_mw_cm": ("dipole_mw", 1.0),
    "atom_mass_kg": ("atom_mass", 1.0),
    "temperature_k": ("temperature", 1.0),
    "carrier_freq_ghz": ("carrier_freq", 1e9),
}

_DRIVE_KEYS = {
    "probe_rabi_mhz": ("omega_p", TWO_PI * 1e6),
    "coupler_rabi_mhz": ("omega_c", TWO_PI * 1e6),
    "mw_rabi_mhz": ("omega_mw", TWO_PI * 1e6),
    "probe_detuning_mhz": ("delta_p", TWO_PI * 1e6),
    "coupler_detuning_mhz": ("delta_c", TWO_PI * 1e6),
    "mw_detuning_mhz": ("delta_mw", TWO_PI * 1e6),
}

SIGNAL_KINDS = ("am_sinusoid", "am_square", "am_csv", "fm_sinusoid", "fm_csv")


@dataclass
class RunConfig:
    """Resolved settings for one CLI invocation."""

    ladder: LadderConfig
    drive: DriveState
    scan: ScanSettings
    signal_kind: str = "am_sinusoid"
    e_carrier: float = 2.25          # V/m
    freq_hz: float = 1.0
    depth: float = 0.5
    duty: float = 0.5
    level_low: float = 0.5
    level_high: float = 1.5
    fm_amplitude: float = TWO_PI * 40e6   # rad/s
    csv_path: str = ""
    interpolation: str = "linear"
    duration: float = 1.0
    sampling_rate: float = 50.0
    noise_rms: float = 0.0
    seed: int = 0
    preset: str = "experiment"

    def echo(self) -> dict:
        """Flat config echo (explicit units) for output-file headers."""
        d = self.drive
        c = self.ladder
        return {
            "preset": self.preset,
            "probe_rabi_mhz": d.omega_p / TWO_PI / 1e6,
            "coupler_rabi_mhz": d.omega_c / TWO_PI / 1e6,
            "mw_rabi_mhz": d.omega_mw / TWO_PI / 1e6,
            "probe_detuning_mhz": d.delta_p / TWO_PI / 1e6,
            "coupler_detuning_mhz": d.delta_c / TWO_PI / 1e6,
            "mw_detuning_mhz": d.delta_mw / TWO_PI / 1e6,
            "gamma_e_mhz": c.gamma_e / TWO_PI / 1e6,
            "gamma_r_khz": c.gamma_r / TWO_PI / 1e3,
            "gamma_rp_khz": c.gamma_rp / TWO_PI / 1e3,
            "deph_probe_mhz": c.deph_probe / TWO_PI / 1e6,
            "deph_ryd_mhz": c.deph_ryd / TWO_PI / 1e6,
            "lambda_p_nm": c.lambda_p / 1e-9,
            "lambda_c_nm": c.lambda_c / 1e-9,
            "dipole_mw_cm": c.dipole_mw,
            "atom_mass_kg": c.atom_mass,
            "temperature_k": c.temperature,
            "carrier_freq_ghz": c.carrier_freq / 1e9,
            "scan_mode": self.scan.mode.value,
            "scan_points": self.scan.n_points,
            "scan_span_mhz": ("auto" if self.scan.span is None
                              else self.scan.span / TWO_PI / 1e6),
            "velocity_nodes": self.scan.n_velocity_nodes,
            "velocity_core_mps": ("auto" if self.scan.velocity_core is None
                                  else self.scan.velocity_core),
            "signal_kind": self.signal_kind,
            "e_carrier_v_per_m": self.e_carrier,
            "signal_freq_hz": self.freq_hz,
            "depth": self.depth,
            "fm_amplitude_mhz": self.fm_amplitude / TWO_PI / 1e6,
            "duration_s": self.duration,
            "sampling_rate_hz": self.sampling_rate,
            "noise_rms": self.noise_rms,
            "seed": self.seed,
        }


class ConfigError(ValueError):
    pass


def _preset_values(name: str) -> tuple[LadderConfig, DriveState, float | None]:
    if name == "receiver":
        return (presets.receiver_config(), presets.receiver_drive(),
                presets.RECEIVER_VELOCITY_CORE)
    if name == "experiment":
        return presets.experiment_config(), presets.experiment_drive(), None
    raise ConfigError(f"unknown preset {name!r} (receiver | experiment)")


def _get(parser: configparser.ConfigParser, section: str, key: str,
         cast, fallback):
    if not parser.has_option(section, key):
        return fallback
    raw = parser.get(section, key).strip()
    if raw == "":
        return fallback
    try:
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}: {exc}") from exc


def load_config(path: str | Path | None = None,
                preset: str = "experiment",
                overrides: dict | None = None) -> RunConfig:
    """Build a RunConfig from preset defaults, an optional config file, and
    CLI overrides (flat ``section.key`` -> raw string), in that order."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        try:
            parser.read_string(text, source=str(path))
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from exc
    for flat_key, value in (overrides or {}).items():
        if value is None:
            continue
        section, _, key = flat_key.partition(".")
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, str(value))

    preset = _get(parser, "link", "preset", str, preset)
    ladder0, drive0, core0 = _preset_values(preset)

    ladder_kw = {}
    for key, (field_name, scale) in _LADDER_KEYS.items():
        value = _get(parser, "ladder", key, float, None)
        if value is not None:
            ladder_kw[field_name] = value * scale
    try:
        ladder = (LadderConfig(**{**_as_dict(ladder0), **ladder_kw})
                  if ladder_kw else ladder0)
    except ValueError as exc:
        raise ConfigError(f"[ladder]: {exc}") from exc

    drive_kw = {}
    for key, (field_name, scale) in _DRIVE_KEYS.items():
        value = _get(parser, "drive", key, float, None)
        if value is not None:
            drive_kw[field_name] = value * scale
    try:
        drive = drive0.replace(**drive_kw) if drive_kw else drive0
    except ValueError as exc:
        raise ConfigError(f"[drive]: {exc}") from exc

    mode_name = _get(parser, "scan", "mode", str, "coupler")
    if mode_name not in ("coupler", "probe"):
        raise ConfigError(f"[scan] mode: {mode_name!r} (coupler | probe)")
    span_mhz = _get(parser, "scan", "span_mhz", float, None)
    scan = ScanSettings(
        mode=ScanMode.COUPLER if mode_name == "coupler" else ScanMode.PROBE,
        n_points=_get(parser, "scan", "points", int, 401),
        span=None if span_mhz is None else TWO_PI * span_mhz * 1e6,
        n_velocity_nodes=_get(parser, "scan", "velocity_nodes", int, 64),
        velocity_core=_get(parser, "scan", "velocity_core_mps", float, core0),
    )
    if scan.n_points < 2:
        raise ConfigError("[scan] points: need at least 2")
    if scan.n_velocity_nodes < 1:
        raise ConfigError("[scan] velocity_nodes: need at least 1")

    kind = _get(parser, "signal", "kind", str, "am_sinusoid")
    if kind not in SIGNAL_KINDS:
        raise ConfigError(f"[signal] kind: {kind!r} not in {SIGNAL_KINDS}")
    rc = RunConfig(
        ladder=ladder, drive=drive, scan=scan, signal_kind=kind,
        e_carrier=_get(parser, "signal", "e_carrier_v_per_m", float, 2.25),
        freq_hz=_get(parser, "signal", "freq_hz", float, 1.0),
        depth=_get(parser, "signal", "depth", float, 0.5),
        duty=_get(parser, "signal", "duty", float, 0.5),
        level_low=_get(parser, "signal", "low", float, 0.5),
        level_high=_get(parser, "signal", "high", float, 1.5),
        fm_amplitude=TWO_PI * 1e6 * _get(parser, "signal", "fm_amplitude_mhz",
                                         float, 40.0),
        csv_path=_get(parser, "signal", "csv_path", str, ""),
        interpolation=_get(parser, "signal", "interpolation", str, "linear"),
        duration=_get(parser, "signal", "duration_s", float, 1.0),
        sampling_rate=_get(parser, "link", "sampling_rate_hz", float, 50.0),
        noise_rms=_get(parser, "link", "noise_rms", float, 0.0),
        seed=_get(parser, "link", "seed", int, 0),
        preset=preset,
    )
    if rc.duration <= 0:
        raise ConfigError("[signal] duration_s: must be > 0")
    if rc.e_carrier <= 0:
        raise ConfigError("[signal] e_carrier_v_per_m: must be > 0")
    if rc.sampling_rate <= 0:
        raise ConfigError("[link] sampling_rate_hz: must be > 0")
    return rc


def _as_dict(cfg: LadderConfig) -> dict:
    return {name: getattr(cfg, name) for name in (
        "gamma_e", "gamma_r", "gamma_rp", "deph_probe", "deph_ryd",
        "lambda_p", "lambda_c", "dipole_mw", "atom_mass", "temperature",
        "carrier_freq", "level_labels")}


def _waveform_csv(path: str, value_scale: float) -> Arbitrary:
    rows = []
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8")
                                  .splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except (IndexError, ValueError):
            if line_no == 1:
                continue  # allow a column-header line
            raise ConfigError(f"{path}:{line_no}: expected 'time_s,value'")
    if len(rows) < 2:
        raise ConfigError(f"{path}: need at least two waveform samples")
    t = np.array([r[0] for r in rows])
    dt = np.diff(t)
    if np.any(dt <= 0) or np.ptp(dt) > 1e-9 * dt[0]:
        raise ConfigError(f"{path}: time column must be uniformly increasing")
    values = tuple(r[1] * value_scale for r in rows)
    return Arbitrary(samples=values, sample_rate=1.0 / dt[0])


def build_signal(rc: RunConfig) -> "AmSignal | FmSignal":
    """Instantiate the configured AM or FM signal description."""
    if rc.signal_kind == "am_sinusoid":
        wf = Sinusoid(freq_s=rc.freq_hz, depth=rc.depth)
    elif rc.signal_kind == "am_square":
        wf = Square(freq_s=rc.freq_hz, duty=rc.duty,
                    low=rc.level_low, high=rc.level_high)
    elif rc.signal_kind == "am_csv":
        wf = _waveform_csv(rc.csv_path, 1.0)
        wf = Arbitrary(samples=wf.samples, sample_rate=wf.sample_rate,
                       interpolation=rc.interpolation)
    elif rc.signal_kind == "fm_sinusoid":
        wf = FmCosine(amplitude=rc.fm_amplitude, freq_s=rc.freq_hz)
    elif rc.signal_kind == "fm_csv":
        wf = _waveform_csv(rc.csv_path, TWO_PI * 1e6)  # file values in MHz
        wf = Arbitrary(samples=wf.samples, sample_rate=wf.sample_rate,
                       interpolation=rc.interpolation)
    else:
        raise ConfigError(f"unknown signal kind {rc.signal_kind!r}")
    baseband = Baseband(waveform=wf, duration=rc.duration)
    if rc.signal_kind.startswith("am"):
        return AmSignal(e_carrier=rc.e_carrier, baseband=baseband,
                        carrier_freq=rc.ladder.carrier_freq)
    return FmSignal(e_carrier=rc.e_carrier, baseband=baseband,
                    carrier_freq=rc.ladder.carrier_freq)
