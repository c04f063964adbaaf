"""Monte Carlo estimate of the typical-link subchannel rate in a Poisson THz network."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .antenna import AntennaConfig, angle_window, effective_gain
from .numerics import RngStream
from .propagation import ChannelConfig, los_probability, path_loss
from .units import dbm_to_watts

__all__ = [
    "INTERFERENCE_MODES",
    "NetworkScenario",
    "Realization",
    "co_band_probability",
    "sample_realization",
    "interference",
    "signal_psd",
    "instantaneous_rate",
    "mean_rate",
    "empirical_laplace",
]

INTERFERENCE_MODES = ("windowed", "full", "off")


@dataclass(frozen=True)
class NetworkScenario:
    """Typical link plus the surrounding Poisson field of transmitters.

    Defaults reproduce the dense-network setting used for the rate-versus-
    distance study (270 GHz toward 28.7 degrees, 5 GHz subchannel, 0.5 / m^2).
    """

    density: float = 0.5
    transmit_psd: float = float(dbm_to_watts(-71.76))
    noise_psd: float = float(dbm_to_watts(-168.0))
    frequency: float = 270e9
    bandwidth: float = 5e9
    distance: float = 30.0
    angle: float = float(np.deg2rad(28.7))
    sim_radius: float = 500.0
    trials: int = 30_000
    interference_mode: str = "windowed"

    def __post_init__(self):
        if not self.density > 0:
            raise ValueError("density must be > 0")
        if not (self.transmit_psd > 0 and self.noise_psd > 0):
            raise ValueError("transmit and noise PSDs must be > 0")
        if not self.bandwidth > 0:
            raise ValueError("subchannel bandwidth must be > 0")
        if not 0 < self.angle < np.pi / 2:
            raise ValueError("typical angle must lie in (0, pi/2)")
        if not self.distance >= 0:
            raise ValueError("typical distance must be >= 0")
        if not self.sim_radius > self.distance:
            raise ValueError("simulation radius must exceed the typical distance")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.interference_mode not in INTERFERENCE_MODES:
            raise ValueError(f"interference_mode must be one of {INTERFERENCE_MODES}")

    def validate(self, antenna: AntennaConfig):
        if not self.frequency > antenna.cutoff_frequency:
            raise ValueError("typical frequency must exceed the antenna cutoff frequency")


@dataclass
class Realization:
    """Interferers seen from the typical receiver at the origin."""

    distance: np.ndarray
    direction: np.ndarray
    co_band: np.ndarray
    los: np.ndarray

    def __len__(self):
        return len(self.distance)

    @classmethod
    def empty(cls):
        return cls(np.empty(0), np.empty(0), np.empty(0, dtype=bool), np.empty(0, dtype=bool))


def co_band_probability(scenario: NetworkScenario, antenna: AntennaConfig) -> float:
    """Probability ``2 B sin(theta) tan(theta) / (pi f_co)`` that a transmitter shares the band."""
    p = 2.0 * float(angle_window(antenna, scenario.angle, scenario.bandwidth)) / np.pi
    if p > 1.0:
        raise ValueError(
            f"co-band probability {p:.3f} exceeds 1: subchannel bandwidth too large "
            "for this cutoff frequency and angle"
        )
    return p


def sample_realization(scenario, antenna, channel, rng, thinned=False) -> Realization:
    """Draw one marked PPP realization on the disk of radius ``sim_radius``.

    With ``thinned=False`` every transmitter is drawn and independently marked
    co-band, LoS and with a uniform direction. ``thinned=True`` draws the
    co-band sub-process (density ``lambda * P_f``) directly; it has the same
    law for every quantity that depends on co-band points only, at a
    fraction of the cost.
    """
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    p_band = co_band_probability(scenario, antenna)
    density = scenario.density * p_band if thinned else scenario.density
    area = np.pi * scenario.sim_radius**2
    n = gen.poisson(density * area)
    r = scenario.sim_radius * np.sqrt(gen.random(n))
    phi = gen.uniform(0.0, np.pi / 2, n)
    co_band = np.ones(n, dtype=bool) if thinned else gen.random(n) < p_band
    los = gen.random(n) < los_probability(channel, r)
    return Realization(r, phi, co_band, los)


def signal_psd(scenario, antenna, channel) -> float:
    return float(
        scenario.transmit_psd
        * effective_gain(antenna, scenario.frequency, scenario.angle)
        * path_loss(channel, scenario.frequency, scenario.distance)
    )


def interference(scenario, antenna, channel, realization, mode=None) -> float:
    """Aggregate interference PSD at the typical receiver."""
    mode = mode or scenario.interference_mode
    if mode == "off" or len(realization) == 0:
        return 0.0
    active = realization.co_band & realization.los
    if mode == "windowed":
        half = 0.5 * float(angle_window(antenna, scenario.angle, scenario.bandwidth))
        phi = realization.direction
        active &= (phi >= scenario.angle - half) & (phi <= scenario.angle + half)
    elif mode != "full":
        raise ValueError(f"unknown interference mode {mode!r}")
    if not active.any():
        return 0.0
    g = effective_gain(antenna, scenario.frequency, realization.direction[active])
    loss = path_loss(channel, scenario.frequency, realization.distance[active])
    return float(np.sum(scenario.transmit_psd * g * loss))


def instantaneous_rate(scenario, antenna, channel, realization, mode=None) -> float:
    """Shannon rate ``B log2(1 + S / (I + sigma^2))`` of one realization, in bit/s."""
    s = signal_psd(scenario, antenna, channel)
    i = interference(scenario, antenna, channel, realization, mode)
    return scenario.bandwidth * np.log2(1.0 + s / (i + scenario.noise_psd))


def mean_rate(scenario, antenna, channel, base_seed=0, mode=None, trials=None):
    """Sample mean and standard error of the rate over independent trials.

    Trial ``k`` uses ``RngStream(base_seed, k)``, so results do not depend on
    how trials are partitioned.
    """
    scenario.validate(antenna)
    trials = scenario.trials if trials is None else trials
    if trials < 2:
        raise ValueError("mean_rate needs at least 2 trials")
    mode = mode or scenario.interference_mode
    s = signal_psd(scenario, antenna, channel)
    if mode == "off":
        rate = scenario.bandwidth * np.log2(1.0 + s / scenario.noise_psd)
        return float(rate), 0.0

    rates = np.empty(trials)
    for k in range(trials):
        real = sample_realization(scenario, antenna, channel, RngStream(base_seed, k), thinned=True)
        i = interference(scenario, antenna, channel, real, mode)
        rates[k] = np.log2(1.0 + s / (i + scenario.noise_psd))
    rates *= scenario.bandwidth
    return float(np.mean(rates)), float(np.std(rates, ddof=1) / np.sqrt(trials))


def empirical_laplace(scenario, antenna, channel, s_values, base_seed=0, mode=None, trials=None):
    """Monte Carlo ``E[exp(-s I)]`` for each ``s`` with its standard error."""
    mode = mode or scenario.interference_mode
    trials = scenario.trials if trials is None else trials
    s_values = np.atleast_1d(np.asarray(s_values, dtype=float))
    samples = np.empty((trials, len(s_values)))
    for k in range(trials):
        real = sample_realization(scenario, antenna, channel, RngStream(base_seed, k), thinned=True)
        samples[k] = np.exp(-s_values * interference(scenario, antenna, channel, real, mode))
    return samples.mean(axis=0), samples.std(axis=0, ddof=1) / np.sqrt(trials)
