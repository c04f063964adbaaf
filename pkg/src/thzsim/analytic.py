"""Average subchannel rate from the Laplace functional of the interferer PPP.

The rate is evaluated as the nested integral

    (B / ln 2) * int_0^inf (1 - exp(-s X)) / s * Theta(s) * exp(-s sigma^2) ds,
    Theta(s) = exp(-2 pi lambda P_f int_0^inf P_LoS(r) (1 - Xi(r)) r dr),

with ``X`` the received signal PSD of the typical link.  Everything below
depends on ``s`` and ``r`` only through ``u = s q_t rho max(D, r)**-eta``, so
the interference kernel ``1 - Xi`` is written as a function ``h(u)``.

Kernels (``mode``):

``windowed``
    ``h(u) = (2/pi) int_window (1 - exp(-u G(phi))) dphi``.  Directions outside
    the co-band window carry probability mass but no interference, so they
    contribute nothing; this is the form that matches the windowed simulator.
``as-printed``
    ``1 - (2/pi) int_window exp(-u G(phi)) dphi``, i.e. the windowed kernel
    plus the constant ``1 - |window| 2/pi``.  The constant makes the radial
    integral diverge under the 3GPP LoS model, so ``Theta`` collapses to 0;
    it is evaluated up to ``r_cap`` and kept for comparison only.
``full``
    Same as ``windowed`` with the window widened to ``(0, pi/2)``: side lobes
    of every co-band interferer count.
``off``
    ``Theta = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .antenna import angle_window, effective_gain
from .netsim import co_band_probability
from .numerics import DEFAULT_SPEC, QuadratureSpec, integrate_finite, integrate_semi_infinite
from .propagation import intercept, los_probability

__all__ = [
    "ANALYTIC_MODES",
    "RateIntegrandContext",
    "make_context",
    "xi",
    "laplace_interference",
    "average_rate",
    "average_rate_lower_bound",
    "awgn_rate",
]

ANALYTIC_MODES = ("windowed", "as-printed", "full", "off", "lower-bound")
R_CAP = 1e4


@dataclass(frozen=True)
class RateIntegrandContext:
    transmit_psd: float
    noise_psd: float
    bandwidth: float
    frequency: float
    angle: float
    window: tuple
    rho: float
    Y: float
    X: float
    thinned_density: float

    @property
    def s_scale(self) -> float:
        # knee of (1 - e^{-sX}) e^{-s sigma^2} / s; the noise term dominates at low SNR
        return 1.0 / (self.X + self.noise_psd)

    @property
    def window_width(self) -> float:
        return self.window[1] - self.window[0]


def make_context(scenario, antenna, channel) -> RateIntegrandContext:
    scenario.validate(antenna)
    half = 0.5 * float(angle_window(antenna, scenario.angle, scenario.bandwidth))
    window = (max(scenario.angle - half, 0.0), min(scenario.angle + half, np.pi / 2))
    rho = float(intercept(scenario.frequency))
    Y = scenario.transmit_psd * float(effective_gain(antenna, scenario.frequency, scenario.angle)) * rho
    X = Y * max(channel.reference_distance, scenario.distance) ** (-channel.pathloss_exponent)
    return RateIntegrandContext(
        transmit_psd=scenario.transmit_psd,
        noise_psd=scenario.noise_psd,
        bandwidth=scenario.bandwidth,
        frequency=scenario.frequency,
        angle=scenario.angle,
        window=window,
        rho=rho,
        Y=Y,
        X=X,
        thinned_density=scenario.density * co_band_probability(scenario, antenna),
    )


def _inner_spec(spec):
    return replace(spec, relative_tolerance=spec.relative_tolerance / 10.0, absolute_tolerance=1e-300)


class _Kernel:
    """``h(u) = const + (2/pi) int_lo^hi (1 - exp(-u G(phi))) dphi`` with series bounds.

    ``k1`` and ``k2`` satisfy ``0 <= k1 u - (h(u) - const) <= k2 u**2``.
    """

    def __init__(self, ctx, antenna, mode, spec):
        self.spec = _inner_spec(spec)
        self.const = 0.0
        self.point_gain = None
        if mode == "lower-bound":
            self.point_gain = float(effective_gain(antenna, ctx.frequency, ctx.angle))
            weight = 2.0 * ctx.window_width / np.pi
            self.k1 = weight * self.point_gain
            self.k2 = 0.5 * weight * self.point_gain**2
            self.weight = weight
            return
        if mode == "full":
            lo, hi = 0.0, np.pi / 2
        elif mode in ("windowed", "as-printed"):
            lo, hi = ctx.window
        else:
            raise ValueError(f"unknown analytic mode {mode!r}")
        if mode == "as-printed":
            self.const = 1.0 - 2.0 * (hi - lo) / np.pi
        self.lo, self.hi = lo, hi
        self.gain = lambda phi: effective_gain(antenna, ctx.frequency, phi)
        if hi > lo:
            moments = integrate_finite(
                lambda phi: np.stack([self.gain(phi), self.gain(phi) ** 2], axis=-1), lo, hi, self.spec
            )
        else:
            moments = np.zeros(2)
        self.k1 = 2.0 / np.pi * moments[0]
        self.k2 = 1.0 / np.pi * moments[1]

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.point_gain is not None:
            return self.weight * -np.expm1(-u * self.point_gain)
        if not self.hi > self.lo:
            return np.full(u.shape, self.const)
        flat = u.ravel()

        def integrand(phi):
            return -np.expm1(-np.outer(self.gain(phi), flat))

        val = 2.0 / np.pi * integrate_finite(integrand, self.lo, self.hi, self.spec)
        return self.const + np.reshape(val, u.shape)


def _exponent(ctx, antenna, channel, s, mode, spec, kernel=None):
    """``2 pi lambda P_f int_0^inf P_LoS(r) h(u(s, r)) r dr`` for each ``s``."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if ctx.thinned_density == 0.0:
        return np.zeros_like(s)
    eta = channel.pathloss_exponent
    D = channel.reference_distance
    a1, a2 = channel.blockage_a1, channel.blockage_a2
    if eta <= 1.0:
        raise ValueError("interference integral diverges for path-loss exponent <= 1")
    kernel = kernel or _Kernel(ctx, antenna, mode, spec)
    coef = 2.0 * np.pi * ctx.thinned_density
    c = s * ctx.transmit_psd * ctx.rho
    tol_exponent = spec.relative_tolerance * 1e-2

    if mode == "as-printed":
        r_int, tail = R_CAP, 0.0
    else:
        # First-order tail beyond r_int is added in closed form; what remains
        # is the exp(-r/a1) part and the second-order remainder, bounded here.
        c_max = float(np.max(c))
        r_int = max(2.0 * a2, 2.0 * D, 100.0)
        while r_int < R_CAP:
            bound = coef * (
                kernel.k1 * c_max * a1 * r_int ** (1 - eta) * np.exp(-r_int / a1)
                + kernel.k2 * c_max**2 * r_int ** (2 - 2 * eta) / (2 * eta - 2)
            )
            if bound <= tol_exponent:
                break
            r_int = min(2.0 * r_int, R_CAP)
        tail = kernel.k1 * c * a2 * r_int ** (1 - eta) / (eta - 1)

    def integrand(r):
        u = np.outer(np.maximum(D, r) ** (-eta), c)
        return (los_probability(channel, r) * r)[:, None] * kernel(u)

    r_spec = replace(spec, relative_tolerance=spec.relative_tolerance / 10.0,
                     absolute_tolerance=tol_exponent / coef)
    body = integrate_finite(integrand, 0.0, r_int, r_spec, points=(D, a2))
    return coef * (body + tail)


def xi(ctx, channel, antenna, s, r, mode="windowed", spec: QuadratureSpec = DEFAULT_SPEC):
    """Per-interferer Laplace factor ``Xi(r)`` at transform variable ``s``.

    Returns ``Xi`` itself; the rate integral uses ``1 - Xi``.
    """
    u = s * ctx.transmit_psd * ctx.rho * np.maximum(channel.reference_distance, np.asarray(r, dtype=float)) ** (
        -channel.pathloss_exponent
    )
    out = 1.0 - _Kernel(ctx, antenna, mode, spec)(u)
    return out[()] if np.ndim(out) == 0 else out


def laplace_interference(ctx, channel, antenna, s, mode="windowed", spec: QuadratureSpec = DEFAULT_SPEC):
    """``Theta(s) = E[exp(-s I)]`` under the chosen interference kernel."""
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise ValueError("s must be > 0")
    if mode == "off":
        return np.ones_like(s)[()]
    out = np.exp(-_exponent(ctx, antenna, channel, s.ravel(), mode, spec)).reshape(s.shape)
    return out[()] if out.ndim == 0 else out


def _rate(ctx, antenna, channel, mode, spec):
    kernel = None if mode == "off" else _Kernel(ctx, antenna, mode, spec)
    inner = _inner_spec(spec)

    def integrand(s):
        base = -np.expm1(-s * ctx.X) / s * np.exp(-s * ctx.noise_psd)
        if kernel is None:
            return base
        live = base > 0
        theta = np.zeros_like(s)
        if live.any():
            theta[live] = np.exp(-_exponent(ctx, antenna, channel, s[live], mode, inner, kernel))
        return base * theta

    value = ctx.bandwidth / np.log(2.0) * integrate_semi_infinite(integrand, ctx.s_scale, spec)
    if not np.isfinite(value):
        raise FloatingPointError("average rate integral is not finite")
    return float(value)


def average_rate(scenario, antenna, channel, spec: QuadratureSpec = DEFAULT_SPEC, mode="windowed"):
    """Mean rate in bit/s of the typical link averaged over the interferer field."""
    return _rate(make_context(scenario, antenna, channel), antenna, channel, mode, spec)


def average_rate_lower_bound(scenario, antenna, channel, spec: QuadratureSpec = DEFAULT_SPEC):
    """Rate with every in-window interferer gain replaced by the typical-link gain.

    A lower bound whenever the pattern toward ``theta_o`` dominates the window,
    which holds when ``f_o`` is the peak frequency for ``theta_o``.
    """
    return _rate(make_context(scenario, antenna, channel), antenna, channel, "lower-bound", spec)


def awgn_rate(scenario, antenna, channel) -> float:
    """Closed-form interference-free rate ``B log2(1 + X / sigma^2)``."""
    ctx = make_context(scenario, antenna, channel)
    return float(ctx.bandwidth * np.log1p(ctx.X / ctx.noise_psd) / np.log(2.0))
