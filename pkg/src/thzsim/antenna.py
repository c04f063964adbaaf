"""Leaky-wave antenna (TE1 parallel-plate) radiation model.

Gains are in units of the aperture length L, as returned by the array-factor
expression ``L * |sinc(z)|``; any absolute calibration lives in ``xi``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import complex_sinc
from .units import SPEED_OF_LIGHT

__all__ = [
    "AntennaConfig",
    "SlowWaveError",
    "gain",
    "effective_gain",
    "peak_frequency",
    "radiation_bandwidth",
    "angle_window",
    "gain_taylor",
]


class SlowWaveError(ValueError):
    """Frequency at or below cutoff: no fast-wave radiation."""


@dataclass(frozen=True)
class AntennaConfig:
    length: float = 0.06
    plate_separation: float = 3.5e-3
    attenuation: float = 0.0
    xi: float = 1.0

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError("aperture length must be > 0")
        if not self.plate_separation > 0:
            raise ValueError("plate separation must be > 0")
        if not self.attenuation >= 0:
            raise ValueError("attenuation coefficient must be >= 0")
        if not self.xi > 0:
            raise ValueError("gain scale xi must be > 0")

    @property
    def cutoff_frequency(self) -> float:
        return SPEED_OF_LIGHT / (2.0 * self.plate_separation)


def _check_fast_wave(cfg, f):
    if np.any(np.asarray(f) <= cfg.cutoff_frequency):
        raise SlowWaveError(
            f"frequency must exceed the cutoff {cfg.cutoff_frequency:.6g} Hz"
        )


def _check_angle(theta):
    theta = np.asarray(theta)
    if np.any((theta <= 0) | (theta >= np.pi / 2)):
        raise ValueError("propagation angle must lie in the open interval (0, pi/2)")


def gain(cfg: AntennaConfig, f, theta):
    """Radiation pattern magnitude ``L |sinc((-j alpha - k0 cos(theta) + beta) L / 2)|``.

    Broadcasts over ``f`` and ``theta``.
    """
    f = np.asarray(f, dtype=float)
    _check_fast_wave(cfg, f)
    _check_angle(theta)
    k0 = 2.0 * np.pi * f / SPEED_OF_LIGHT
    beta = k0 * np.sqrt(1.0 - (cfg.cutoff_frequency / f) ** 2)
    z = (beta - k0 * np.cos(theta) - 1j * cfg.attenuation) * (cfg.length / 2.0)
    return cfg.length * np.abs(complex_sinc(z))


def effective_gain(cfg: AntennaConfig, f, theta):
    return cfg.xi * gain(cfg, f, theta)


def peak_frequency(cfg: AntennaConfig, theta):
    """Frequency of maximum radiation toward ``theta``: ``f_co / sin(theta)``."""
    _check_angle(theta)
    return cfg.cutoff_frequency / np.sin(theta)


def radiation_bandwidth(cfg: AntennaConfig, theta, delta_theta):
    """Frequency span covered when the beam sweeps ``delta_theta`` around ``theta``."""
    _check_angle(theta)
    return cfg.cutoff_frequency * delta_theta / (np.sin(theta) * np.tan(theta))


def angle_window(cfg: AntennaConfig, theta_o, bandwidth):
    """Angular width whose peak frequencies fill ``bandwidth`` around ``theta_o``.

    Inverse of :func:`radiation_bandwidth`. Interferers are co-directional
    when ``phi`` falls in ``[theta_o - w/2, theta_o + w/2]``.
    """
    _check_angle(theta_o)
    return bandwidth * np.sin(theta_o) * np.tan(theta_o) / cfg.cutoff_frequency


def gain_taylor(cfg: AntennaConfig, f, theta):
    """Lossless quadratic gain model used by the allocator.

    ``L - L**3/24 * (k0 * (1 - f_co**2 / (2 f**2) - cos(theta)))**2``; it can go
    negative far from the main lobe.
    """
    f = np.asarray(f, dtype=float)
    _check_fast_wave(cfg, f)
    k0 = 2.0 * np.pi * f / SPEED_OF_LIGHT
    detune = k0 * (1.0 - cfg.cutoff_frequency**2 / (2.0 * f**2) - np.cos(theta))
    return cfg.length - cfg.length**3 / 24.0 * detune**2
