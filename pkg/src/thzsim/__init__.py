"""Leaky-wave-antenna THz network simulator.

Antenna pattern and channel models, Monte Carlo and Laplace-functional rate
estimates for a Poisson field of interferers, greedy subchannel allocation
and energy-efficient PSD allocation.
"""

from .allocation import AllocationConfig, SubchannelPlan, allocate, equal_allocation, plan_rate
from .analytic import average_rate, average_rate_lower_bound, awgn_rate, laplace_interference
from .antenna import AntennaConfig, effective_gain, gain, peak_frequency
from .netsim import NetworkScenario, mean_rate, sample_realization
from .numerics import QuadratureSpec, RngStream
from .power_ee import PowerConfig, allocate_power, optimal_psd
from .propagation import ChannelConfig, los_probability, path_loss

__version__ = "0.1.0"

__all__ = [
    "AllocationConfig",
    "AntennaConfig",
    "ChannelConfig",
    "NetworkScenario",
    "PowerConfig",
    "QuadratureSpec",
    "RngStream",
    "SubchannelPlan",
    "allocate",
    "allocate_power",
    "average_rate",
    "average_rate_lower_bound",
    "awgn_rate",
    "effective_gain",
    "equal_allocation",
    "gain",
    "laplace_interference",
    "los_probability",
    "mean_rate",
    "optimal_psd",
    "path_loss",
    "peak_frequency",
    "plan_rate",
    "sample_realization",
]
