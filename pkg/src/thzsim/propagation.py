"""Free-space LoS path loss and the 3GPP-style blockage probability."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .units import SPEED_OF_LIGHT

__all__ = ["ChannelConfig", "intercept", "path_loss", "los_probability"]


@dataclass(frozen=True)
class ChannelConfig:
    pathloss_exponent: float = 2.0
    reference_distance: float = 1.0
    blockage_a1: float = 63.0
    blockage_a2: float = 18.0

    def __post_init__(self):
        if not self.pathloss_exponent > 0:
            raise ValueError("path-loss exponent must be > 0")
        if not self.reference_distance > 0:
            raise ValueError("reference distance must be > 0")
        if not (self.blockage_a1 > 0 and self.blockage_a2 > 0):
            raise ValueError("blockage parameters a1, a2 must be > 0")


def intercept(f):
    """Free-space intercept ``(c / (4 pi f))**2``."""
    return (SPEED_OF_LIGHT / (4.0 * np.pi * np.asarray(f, dtype=float))) ** 2


def path_loss(cfg: ChannelConfig, f, r):
    """Attenuation ``rho(f) * max(D, r)**(-eta)`` (a gain below one, not dB)."""
    r = np.asarray(r, dtype=float)
    return intercept(f) * np.maximum(cfg.reference_distance, r) ** (-cfg.pathloss_exponent)


def los_probability(cfg: ChannelConfig, r):
    """``exp(-r/a1) + (1 - exp(-r/a1)) * min(a2/r, 1)``; equal to 1 for ``r <= a2``."""
    r = np.asarray(r, dtype=float)
    decay = np.exp(-r / cfg.blockage_a1)
    with np.errstate(divide="ignore"):
        near = np.where(r > cfg.blockage_a2, cfg.blockage_a2 / np.where(r > 0, r, 1.0), 1.0)
    out = decay + (1.0 - decay) * near
    return out[()] if out.ndim == 0 else out
