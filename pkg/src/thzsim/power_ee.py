"""Per-subchannel transmit PSD maximising average energy efficiency.

Each subchannel solves ``max log2(1 + q Xi) / (q + q_c)`` over
``gamma_th / Xi <= q <= q_max`` independently.  The derivative has the sign of

    F(q) = (q + q_c) Xi / (1 + q Xi) - ln(1 + q Xi),

which strictly decreases in ``q``; so the optimum is ``q_max`` when
``F(q_max) >= 0`` and otherwise the root of ``F`` lifted to the QoS floor.

EE values are in (bit/s/Hz) / (W/Hz), i.e. bit per joule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .numerics import bisect_decreasing
from .units import db_to_linear, dbm_to_watts

__all__ = [
    "InfeasibleError",
    "PowerConfig",
    "PowerAllocation",
    "ee_objective",
    "ee_stationarity",
    "optimal_psd",
    "allocate_power",
    "average_ee",
]


class InfeasibleError(ValueError):
    """No subchannel can meet the QoS threshold at the maximum PSD."""


@dataclass(frozen=True)
class PowerConfig:
    channel_to_noise: tuple
    q_max: float = float(dbm_to_watts(-71.76))
    q_c: float = float(dbm_to_watts(-81.76))
    qos_threshold: float = float(db_to_linear(-6.5))

    def __post_init__(self):
        object.__setattr__(self, "channel_to_noise", tuple(float(x) for x in np.atleast_1d(self.channel_to_noise)))
        if not (self.q_max > 0 and self.q_c > 0):
            raise ValueError("q_max and q_c must be > 0")
        if not self.qos_threshold >= 0:
            raise ValueError("QoS threshold must be >= 0")
        if any(not x > 0 for x in self.channel_to_noise):
            raise ValueError("channel-to-noise ratios must be > 0")


@dataclass
class PowerAllocation:
    q_star: List[Optional[float]]
    feasible: List[bool]
    average_ee: float

    @property
    def n_feasible(self) -> int:
        return sum(self.feasible)


def ee_objective(q, xi_n, q_c):
    """``log2(1 + q Xi) / (q + q_c)``."""
    q = np.asarray(q, dtype=float)
    return np.log1p(q * xi_n) / np.log(2.0) / (q + q_c)


def ee_stationarity(q, xi_n, q_c):
    """Sign-carrying part of the EE derivative; decreasing in ``q``."""
    q = np.asarray(q, dtype=float)
    x = q * xi_n
    return (q + q_c) * xi_n / (1.0 + x) - np.log1p(x)


def optimal_psd(cfg: PowerConfig, n: int) -> Optional[float]:
    """Optimal PSD of subchannel ``n``, or ``None`` when QoS is unreachable at ``q_max``."""
    xi_n = cfg.channel_to_noise[n]
    q_floor = cfg.qos_threshold / xi_n
    if q_floor > cfg.q_max:
        return None
    if ee_stationarity(cfg.q_max, xi_n, cfg.q_c) >= 0:
        return cfg.q_max
    lo = np.finfo(float).eps * cfg.q_max
    q_o = bisect_decreasing(lambda q: float(ee_stationarity(q, xi_n, cfg.q_c)), lo, cfg.q_max, 1e-12 * cfg.q_max)
    return max(q_o, q_floor)


def average_ee(q, channel_to_noise, q_c) -> float:
    q = np.asarray(q, dtype=float)
    return float(np.mean(ee_objective(q, np.asarray(channel_to_noise), q_c)))


def allocate_power(cfg: PowerConfig) -> PowerAllocation:
    """Solve every subchannel; infeasible ones are flagged and left out of the average."""
    if not cfg.channel_to_noise:
        raise ValueError("need at least one subchannel")
    q_star = [optimal_psd(cfg, n) for n in range(len(cfg.channel_to_noise))]
    feasible = [q is not None for q in q_star]
    if not any(feasible):
        raise InfeasibleError("no subchannel meets the QoS threshold at q_max")
    xs = np.array([x for x, ok in zip(cfg.channel_to_noise, feasible) if ok])
    qs = np.array([q for q in q_star if q is not None])
    return PowerAllocation(q_star, feasible, average_ee(qs, xs, cfg.q_c))
