"""Shared numerical kernels: complex sinc, adaptive quadrature, bisection, RNG streams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "QuadratureSpec",
    "QuadratureError",
    "BracketError",
    "RngStream",
    "complex_sinc",
    "integrate_finite",
    "integrate_semi_infinite",
    "bisect_decreasing",
]

_SERIES_CUTOFF = 1e-4

# 15-point Kronrod extension of the 7-point Gauss-Legendre rule on [-1, 1].
# Non-negative half of the abscissae; the Gauss nodes are every second entry.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1:7:2] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[9:15:2] = _WG[2::-1]


class QuadratureError(RuntimeError):
    """Adaptive quadrature stopped before meeting its tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class BracketError(ValueError):
    """Root bracket does not satisfy g(lo) > 0 > g(hi)."""


@dataclass(frozen=True)
class QuadratureSpec:
    relative_tolerance: float = 1e-6
    absolute_tolerance: float = 1e-12
    max_refinement_depth: int = 30
    max_panels: int = 20000

    def __post_init__(self):
        if not self.relative_tolerance > 0:
            raise ValueError("relative_tolerance must be > 0")
        if not self.absolute_tolerance >= 0:
            raise ValueError("absolute_tolerance must be >= 0")
        if self.max_refinement_depth < 1:
            raise ValueError("max_refinement_depth must be >= 1")


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class RngStream:
    """Deterministic random stream keyed by ``(seed, stream_id)``.

    The pair is fed to a :class:`numpy.random.SeedSequence` as entropy plus
    spawn key, so distinct stream ids give statistically independent PCG64
    streams and the same pair always reproduces the same bits.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not 0 <= value < 2**64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {value}")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(seq))


def complex_sinc(z):
    """Unnormalised sinc ``sin(z)/z`` for complex (or real) ``z``.

    The removable singularity is filled with 1, and for ``|z| < 1e-4`` the
    series ``1 - z**2/6 + z**4/120`` replaces the quotient.

    >>> complex_sinc(0j)
    (1+0j)
    """
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < _SERIES_CUTOFF
    safe = np.where(small, 1.0, z)
    z2 = z * z
    out = np.where(small, 1.0 - z2 / 6.0 + z2 * z2 / 120.0, np.sin(safe) / safe)
    return out[()] if out.ndim == 0 else out


def _kronrod_panels(f, a, b):
    """Evaluate the G7/K15 pair on every panel ``[a[i], b[i]]`` in one call to ``f``."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float)
    fx = fx.reshape((len(a), 15) + fx.shape[1:])
    if not np.all(np.isfinite(fx)):
        raise FloatingPointError("integrand returned non-finite values")
    scale = half.reshape((-1,) + (1,) * (fx.ndim - 2))
    kron = np.tensordot(KRONROD_WEIGHTS, fx, axes=([0], [1])) * scale
    gauss = np.tensordot(GAUSS_WEIGHTS, fx, axes=([0], [1])) * scale
    return kron, np.abs(kron - gauss)


def integrate_finite(f, a, b, spec: QuadratureSpec = DEFAULT_SPEC, points=None):
    """Adaptive Gauss-Kronrod (7/15) quadrature of ``f`` over ``[a, b]``.

    ``f`` is called with a 1-D array of abscissae and must return an array
    whose leading axis matches it; any trailing axes are integrated
    component-wise (vector-valued integrands), and convergence is required on
    every component.  ``points`` are interior breakpoints (kinks) that become
    initial panel edges.

    Panels whose error exceeds their width-proportional share of the
    tolerance are bisected together, so each refinement pass costs a single
    vectorised call to ``f``.
    """
    a = float(a)
    b = float(b)
    if not a <= b:
        raise ValueError(f"integration bounds must satisfy a <= b, got [{a}, {b}]")
    if a == b:
        probe = np.asarray(f(np.array([a])), dtype=float)
        return np.zeros(probe.shape[1:])[()]

    edges = [a]
    if points is not None:
        edges.extend(sorted(float(p) for p in points if a < p < b))
    edges.append(b)
    lo = np.array(edges[:-1])
    hi = np.array(edges[1:])
    depth = np.zeros(len(lo), dtype=int)
    est, err = _kronrod_panels(f, lo, hi)
    width = b - a

    while True:
        total = est.sum(axis=0)
        total_err = err.sum(axis=0)
        tol = np.maximum(spec.absolute_tolerance, spec.relative_tolerance * np.abs(total))
        if np.all(total_err <= tol):
            return total[()] if np.ndim(total) == 0 else total

        ratio = err / tol
        score = ratio.reshape(len(lo), -1).max(axis=1) if ratio.ndim > 1 else ratio
        split = score > (hi - lo) / width
        if not split.any():
            split[np.argmax(score)] = True
        if np.any(depth[split] >= spec.max_refinement_depth) or len(lo) + split.sum() > spec.max_panels:
            raise QuadratureError(
                f"quadrature did not converge on [{a}, {b}]: "
                f"error estimate {np.max(total_err):.3e} above tolerance {np.min(tol):.3e}",
                estimate=total,
                error=total_err,
            )

        keep = ~split
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        new_depth = np.concatenate([depth[split], depth[split]]) + 1
        new_est, new_err = _kronrod_panels(f, new_lo, new_hi)

        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        depth = np.concatenate([depth[keep], new_depth])
        est = np.concatenate([est[keep], new_est])
        err = np.concatenate([err[keep], new_err])


def integrate_semi_infinite(f, scale, spec: QuadratureSpec = DEFAULT_SPEC):
    """Integrate ``f`` over ``[0, inf)`` via ``s = scale * t / (1 - t)``.

    ``scale`` should sit near the integrand's knee; the map sends ``s = scale``
    to ``t = 1/2``.
    """
    scale = float(scale)
    if not scale > 0:
        raise ValueError(f"scale must be > 0, got {scale}")

    def mapped(t):
        one_minus = 1.0 - t
        s = scale * t / one_minus
        jac = scale / one_minus**2
        fs = np.asarray(f(s), dtype=float)
        return fs * jac.reshape((-1,) + (1,) * (fs.ndim - 1))

    return integrate_finite(mapped, 0.0, 1.0, spec)


def bisect_decreasing(g, lo, hi, tol):
    """Root of a decreasing function bracketed by ``g(lo) > 0 > g(hi)``.

    Returns the midpoint of the final bracket, whose width is at most ``tol``.
    An exact zero at an endpoint is returned as-is.
    """
    lo = float(lo)
    hi = float(hi)
    if not tol > 0:
        raise ValueError("tol must be > 0")
    g_lo = g(lo)
    g_hi = g(hi)
    if g_lo == 0:
        return lo
    if g_hi == 0:
        return hi
    if not (g_lo > 0 > g_hi):
        raise BracketError(f"need g(lo) > 0 > g(hi); got g({lo})={g_lo}, g({hi})={g_hi}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        g_mid = g(mid)
        if g_mid == 0:
            return mid
        if g_mid > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
