"""Experiment configuration files.

A config is an INI file with the sections ``[antenna]``, ``[channel]``,
``[network]``, ``[allocation]``, ``[power]`` and ``[experiment]``.  Key names
carry their unit (``fo_ghz``, ``qt_dbm_per_hz``, ...); dB values are power
ratios and dBm values are converted to watts.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Tuple

import numpy as np

from .allocation import AllocationConfig
from .antenna import AntennaConfig
from .netsim import INTERFERENCE_MODES, NetworkScenario
from .propagation import ChannelConfig
from .units import db_to_linear, dbm_to_watts

__all__ = [
    "EXPERIMENT_KINDS",
    "KEYS",
    "ConfigError",
    "ExperimentSpec",
    "load_config",
    "write_config",
    "antenna_config",
    "channel_config",
    "network_scenario",
    "allocation_config",
]

EXPERIMENT_KINDS = ("rate-analytic", "rate-mc", "rate-compare", "allocate", "allocate-compare", "power-ee", "sweep")

REQUIRED = object()

# key -> (section, parser, default, unit-free stem)
KEYS = {
    "L_m": ("antenna", float, REQUIRED, "L"),
    "d_m": ("antenna", float, REQUIRED, "d"),
    "alpha_rad_per_m": ("antenna", float, REQUIRED, "alpha"),
    "xi": ("antenna", float, 1.0, None),
    "eta_los": ("channel", float, 2.0, None),
    "D_m": ("channel", float, 1.0, "D"),
    "a1_m": ("channel", float, 63.0, "a1"),
    "a2_m": ("channel", float, 18.0, "a2"),
    "lambda_per_m2": ("network", float, 0.5, "lambda"),
    "qt_dbm_per_hz": ("network", float, -71.76, "qt"),
    "noise_dbm_per_hz": ("network", float, -168.0, "noise"),
    "fo_ghz": ("network", float, 270.0, "fo"),
    "bo_ghz": ("network", float, 5.0, "bo"),
    "ro_m": ("network", float, 30.0, "ro"),
    "theta_o_deg": ("network", str, "28.7", "theta_o"),
    "rsim_m": ("network", float, 500.0, "rsim"),
    "trials": ("network", int, 30_000, None),
    "mode": ("network", str, "windowed", None),
    "btotal_ghz": ("allocation", float, 15.0, "btotal"),
    "band_lo_ghz": ("allocation", float, 100.0, "band_lo"),
    "band_hi_ghz": ("allocation", float, 350.0, "band_hi"),
    "gamma_th_db": ("allocation", float, -6.5, "gamma_th"),
    "epsilon_db": ("allocation", float, 0.2, "epsilon"),
    "rmax_m": ("allocation", float, 100.0, "rmax"),
    "draws": ("allocation", int, 1000, None),
    "qmax_dbm_per_hz": ("power", float, -71.76, "qmax"),
    "qc_dbm_per_hz": ("power", float, -81.76, "qc"),
}
EXPERIMENT_KEYS = ("kind", "sweep_param", "sweep_values", "output", "seed")
SECTIONS = ("antenna", "channel", "network", "allocation", "power", "experiment")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    kind: str
    params: Dict[str, object]
    sweep_param: str = ""
    sweep_values: Tuple[float, ...] = ()
    output: str = ""
    seed: int = 0

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; expected one of {EXPERIMENT_KINDS}")
        self.sweep_values = tuple(float(v) for v in self.sweep_values)
        if self.sweep_param:
            numeric = self.sweep_param in KEYS and (
                KEYS[self.sweep_param][1] is not str or self.sweep_param == "theta_o_deg"
            )
            if not numeric:
                raise ConfigError(f"sweep_param {self.sweep_param!r} is not a numeric config key")
            if not self.sweep_values:
                raise ConfigError("sweep_values must be non-empty when sweep_param is set")
        elif self.sweep_values:
            raise ConfigError("sweep_values given without sweep_param")
        if not all(math.isfinite(v) for v in self.sweep_values):
            raise ConfigError("sweep_values must be finite")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.params.get("mode") not in INTERFERENCE_MODES:
            raise ConfigError(f"mode must be one of {INTERFERENCE_MODES}")

    def with_value(self, key, value) -> "ExperimentSpec":
        params = dict(self.params)
        params[key] = KEYS[key][1](value)
        return ExperimentSpec(self.kind, params, self.sweep_param, self.sweep_values, self.output, self.seed)


def _line_numbers(text):
    lines = {}
    section = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            lines[(section, None)] = no
        elif line and line[0] not in "#;" and ("=" in line or ":" in line):
            key = line.split("=", 1)[0].split(":", 1)[0].strip()
            lines[(section, key)] = no
    return lines


def _unit_mismatch(key):
    for known, (_, _, _, stem) in KEYS.items():
        if stem and key != known and key.startswith(stem + "_"):
            return known
    return None


def load_config(path) -> ExperimentSpec:
    """Parse and validate a config file; errors name the offending key and line."""
    path = Path(path)
    text = path.read_text()
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    lines = _line_numbers(text)

    def where(section, key=None):
        no = lines.get((section, key))
        return f"{path}:{no}" if no else str(path)

    params = {}
    experiment = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(f"{where(section)}: unknown section [{section}]")
        for key, value in parser.items(section):
            if section == "experiment":
                if key not in EXPERIMENT_KEYS:
                    raise ConfigError(f"{where(section, key)}: unknown key {key!r} in [experiment]")
                experiment[key] = value
                continue
            if key not in KEYS:
                expected = _unit_mismatch(key)
                if expected:
                    raise ConfigError(
                        f"{where(section, key)}: unit suffix mismatch for {key!r}; expected {expected!r}"
                    )
                raise ConfigError(f"{where(section, key)}: unknown key {key!r}")
            home, conv, _, _ = KEYS[key]
            if home != section:
                raise ConfigError(f"{where(section, key)}: key {key!r} belongs in [{home}]")
            try:
                params[key] = conv(value)
            except ValueError as exc:
                raise ConfigError(f"{where(section, key)}: bad value for {key!r}: {value!r}") from exc

    for key, (section, conv, default, _) in KEYS.items():
        if key not in params:
            if default is REQUIRED:
                raise ConfigError(f"{path}: missing required key {key!r} in [{section}]")
            params[key] = default

    kind = experiment.get("kind", "sweep")
    values = experiment.get("sweep_values", "").strip()
    try:
        sweep_values = tuple(float(v) for v in values.split(",")) if values else ()
        seed = int(experiment.get("seed", "0"))
    except ValueError as exc:
        raise ConfigError(f"{path}: bad value in [experiment]: {exc}") from exc
    return ExperimentSpec(
        kind=kind,
        params=params,
        sweep_param=experiment.get("sweep_param", "").strip(),
        sweep_values=sweep_values,
        output=experiment.get("output", "").strip(),
        seed=seed,
    )


def write_config(spec: ExperimentSpec, path):
    lines = []
    for section in SECTIONS[:-1]:
        lines.append(f"[{section}]")
        for key, (home, _, _, _) in KEYS.items():
            if home == section:
                value = spec.params[key]
                lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
        lines.append("")
    lines.append("[experiment]")
    lines.append(f"kind = {spec.kind}")
    lines.append(f"sweep_param = {spec.sweep_param}")
    lines.append("sweep_values = " + ", ".join(repr(v) for v in spec.sweep_values))
    lines.append(f"output = {spec.output}")
    lines.append(f"seed = {spec.seed}")
    Path(path).write_text("\n".join(lines) + "\n")


def antenna_config(params) -> AntennaConfig:
    return AntennaConfig(params["L_m"], params["d_m"], params["alpha_rad_per_m"], params["xi"])


def channel_config(params) -> ChannelConfig:
    return ChannelConfig(params["eta_los"], params["D_m"], params["a1_m"], params["a2_m"])


def _typical_angle(params, antenna, frequency):
    raw = str(params["theta_o_deg"]).strip().lower()
    if raw == "peak":
        ratio = antenna.cutoff_frequency / frequency
        if not ratio < 1:
            raise ConfigError("theta_o_deg = peak needs fo_ghz above the cutoff frequency")
        return float(np.arcsin(ratio))
    try:
        return float(np.deg2rad(float(raw)))
    except ValueError as exc:
        raise ConfigError(f"theta_o_deg must be a number of degrees or 'peak', got {raw!r}") from exc


def network_scenario(params, antenna=None) -> NetworkScenario:
    antenna = antenna or antenna_config(params)
    f_o = params["fo_ghz"] * 1e9
    return NetworkScenario(
        density=params["lambda_per_m2"],
        transmit_psd=float(dbm_to_watts(params["qt_dbm_per_hz"])),
        noise_psd=float(dbm_to_watts(params["noise_dbm_per_hz"])),
        frequency=f_o,
        bandwidth=params["bo_ghz"] * 1e9,
        distance=params["ro_m"],
        angle=_typical_angle(params, antenna, f_o),
        sim_radius=params["rsim_m"],
        trials=params["trials"],
        interference_mode=params["mode"],
    )


def allocation_config(params, angle, distance, transmit_psd=None) -> AllocationConfig:
    return AllocationConfig(
        total_bandwidth=params["btotal_ghz"] * 1e9,
        band=(params["band_lo_ghz"] * 1e9, params["band_hi_ghz"] * 1e9),
        qos_threshold=float(db_to_linear(params["gamma_th_db"])),
        ripple_db=params["epsilon_db"],
        angle=angle,
        distance=distance,
        transmit_psd=float(dbm_to_watts(params["qt_dbm_per_hz"])) if transmit_psd is None else transmit_psd,
        noise_psd=float(dbm_to_watts(params["noise_dbm_per_hz"])),
    )
