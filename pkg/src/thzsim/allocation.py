"""Greedy subchannel allocation over a wide THz band for one leaky-wave link.

The allocator works on the lossless quadratic gain model, under which the
center SNR is proportional to

    F(f) = f**-2 * (L - L**3 pi**2 f**2 / (6 c**2) * (1 - f_co**2 / (2 f**2) - cos(theta))**2),

a unimodal function of ``f``.  The first center sits at its maximiser, and
each further subchannel is appended directly below the lowest or above the
highest allocated one, whichever side has the larger ``F``.  Subchannel
widths are set by the ripple limit ``B <= 2 f (Lambda - 1) / (Lambda + 1)``,
``Lambda = 10**(eps/20)``, so neighbouring centers differ by exactly
``Lambda``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .antenna import AntennaConfig, effective_gain, gain_taylor, peak_frequency
from .propagation import ChannelConfig, path_loss
from .units import SPEED_OF_LIGHT, db_to_linear, dbm_to_watts

__all__ = [
    "AllocationConfig",
    "Subchannel",
    "SubchannelPlan",
    "ripple_factor",
    "f_snr",
    "surrogate_objective",
    "first_center_unconstrained",
    "first_center",
    "next_center",
    "bandwidth_for",
    "allocate",
    "plan_rate",
    "equal_allocation",
]


@dataclass(frozen=True)
class AllocationConfig:
    total_bandwidth: float = 15e9
    band: tuple = (100e9, 350e9)
    qos_threshold: float = float(db_to_linear(-6.5))
    ripple_db: float = 0.2
    angle: float = np.pi / 4
    distance: float = 50.0
    transmit_psd: float = float(dbm_to_watts(-71.76))
    noise_psd: float = float(dbm_to_watts(-168.0))

    def __post_init__(self):
        if not self.total_bandwidth > 0:
            raise ValueError("total bandwidth must be > 0")
        if not self.band[0] < self.band[1]:
            raise ValueError("band limits must satisfy f_lo < f_hi")
        if not self.qos_threshold > 0:
            raise ValueError("QoS threshold must be > 0")
        if not self.ripple_db > 0:
            raise ValueError("ripple must be > 0 dB")
        if not 0 < self.angle < np.pi / 2:
            raise ValueError("link angle must lie in (0, pi/2)")
        if not (self.transmit_psd > 0 and self.noise_psd > 0):
            raise ValueError("PSDs must be > 0")

    def validate(self, antenna: AntennaConfig):
        if not antenna.cutoff_frequency < self.band[0]:
            raise ValueError("band must lie above the antenna cutoff frequency")


@dataclass(frozen=True)
class Subchannel:
    center: float
    bandwidth: float
    center_snr: float

    @property
    def lower_edge(self):
        return self.center - 0.5 * self.bandwidth

    @property
    def upper_edge(self):
        return self.center + 0.5 * self.bandwidth


@dataclass
class SubchannelPlan:
    entries: List[Subchannel] = field(default_factory=list)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def count(self) -> int:
        return len(self.entries)

    @property
    def centers(self) -> np.ndarray:
        return np.array([e.center for e in self.entries])

    @property
    def bandwidths(self) -> np.ndarray:
        return np.array([e.bandwidth for e in self.entries])

    @property
    def total_bandwidth(self) -> float:
        return float(sum(e.bandwidth for e in self.entries))

    def surrogate_rate(self) -> float:
        """Objective ``sum B_n log2(1 + SNR_n)`` evaluated on the center SNRs."""
        return float(sum(e.bandwidth * np.log2(1.0 + e.center_snr) for e in self.entries))


def ripple_factor(cfg: AllocationConfig) -> float:
    return 10.0 ** (cfg.ripple_db / 20.0)


def f_snr(cfg: AllocationConfig, antenna: AntennaConfig, channel: ChannelConfig, f):
    """Center SNR under the quadratic gain model; negative gains clamp to 0."""
    g = np.maximum(gain_taylor(antenna, f, cfg.angle), 0.0)
    return cfg.transmit_psd * antenna.xi * path_loss(channel, f, cfg.distance) * g / cfg.noise_psd


def surrogate_objective(cfg: AllocationConfig, antenna: AntennaConfig, f):
    """``F(f)``, proportional to :func:`f_snr` wherever the gain is positive."""
    f = np.asarray(f, dtype=float)
    L = antenna.length
    detune = 1.0 - antenna.cutoff_frequency**2 / (2.0 * f**2) - np.cos(cfg.angle)
    return f**-2 * (L - L**3 * np.pi**2 * f**2 / (6.0 * SPEED_OF_LIGHT**2) * detune**2)


def first_center_unconstrained(cfg: AllocationConfig, antenna: AntennaConfig) -> float:
    """Stationary point ``f_co**2 / sqrt(12 c**2 / (L pi)**2 + 2 (1 - cos(theta)) f_co**2)`` of ``F``."""
    fco = antenna.cutoff_frequency
    L = antenna.length
    return fco**2 / np.sqrt(
        12.0 * SPEED_OF_LIGHT**2 / (L**2 * np.pi**2) + 2.0 * (1.0 - np.cos(cfg.angle)) * fco**2
    )


def first_center(cfg, antenna, channel) -> Optional[float]:
    """Best first center clamped into the band, or ``None`` if it misses the QoS threshold."""
    cfg.validate(antenna)
    f1 = float(np.clip(first_center_unconstrained(cfg, antenna), *cfg.band))
    if f_snr(cfg, antenna, channel, f1) >= cfg.qos_threshold:
        return f1
    return None


def bandwidth_for(cfg: AllocationConfig, f_n, remaining) -> float:
    lam = ripple_factor(cfg)
    return float(min(2.0 * f_n * (lam - 1.0) / (lam + 1.0), remaining))


def _inside_band(cfg, f):
    half = 0.5 * bandwidth_for(cfg, f, np.inf)
    return f - half >= cfg.band[0] and f + half <= cfg.band[1]


def next_center(cfg, antenna, channel, plan: SubchannelPlan, remaining=None) -> Optional[float]:
    """Next center on the ripple lattice, or ``None`` when no admissible candidate meets QoS.

    Candidates whose full-width subchannel would cross a band edge are
    dropped, even if the remaining budget would make it narrower.  On a
    tie in ``F`` the lower frequency wins.
    """
    if not plan.entries:
        raise ValueError("next_center needs a non-empty plan")
    if remaining is None:
        remaining = cfg.total_bandwidth - plan.total_bandwidth
    lam = ripple_factor(cfg)
    centers = plan.centers
    candidates = [c for c in (centers.min() / lam, centers.max() * lam) if _inside_band(cfg, c)]
    if not candidates:
        return None
    scores = [float(surrogate_objective(cfg, antenna, c)) for c in candidates]
    best = candidates[int(np.argmax(scores))]
    if f_snr(cfg, antenna, channel, best) >= cfg.qos_threshold:
        return best
    return None


def allocate(cfg: AllocationConfig, antenna: AntennaConfig, channel: ChannelConfig) -> SubchannelPlan:
    """Greedy allocation: first center, then lattice neighbours until the budget or QoS runs out."""
    plan = SubchannelPlan()
    f1 = first_center(cfg, antenna, channel)
    if f1 is None:
        return plan
    remaining = cfg.total_bandwidth
    f = f1
    while f is not None:
        b = bandwidth_for(cfg, f, remaining)
        if b <= 0:
            break
        plan.entries.append(Subchannel(f, b, float(f_snr(cfg, antenna, channel, f))))
        remaining -= b
        if remaining <= 0:
            break
        f = next_center(cfg, antenna, channel, plan, remaining)
    return plan


def plan_rate(plan, antenna: AntennaConfig, channel: ChannelConfig, angle, distance,
              transmit_psd, noise_psd, attenuation=None) -> float:
    """Sum rate in bit/s of ``plan`` under the exact pattern at ``attenuation``."""
    if not plan.entries:
        return 0.0
    if attenuation is not None:
        antenna = AntennaConfig(antenna.length, antenna.plate_separation, attenuation, antenna.xi)
    centers = plan.centers
    snr = transmit_psd * effective_gain(antenna, centers, angle) * path_loss(channel, centers, distance) / noise_psd
    return float(np.sum(plan.bandwidths * np.log2(1.0 + snr)))


def equal_allocation(cfg: AllocationConfig, antenna: AntennaConfig, channel: ChannelConfig, n) -> SubchannelPlan:
    """Baseline: ``n`` contiguous equal slices of the total bandwidth.

    The block is centered on the peak-radiation frequency for the link angle
    and shifted as a whole to stay inside the band.
    """
    plan = SubchannelPlan()
    if n <= 0:
        return plan
    width = min(cfg.total_bandwidth, cfg.band[1] - cfg.band[0])
    center = float(np.clip(peak_frequency(antenna, cfg.angle), cfg.band[0] + width / 2, cfg.band[1] - width / 2))
    slice_bw = width / n
    for k in range(n):
        f = center - width / 2 + (k + 0.5) * slice_bw
        plan.entries.append(Subchannel(f, slice_bw, float(f_snr(cfg, antenna, channel, f))))
    return plan
