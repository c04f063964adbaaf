"""Independent reference computations shared by the test modules.

Nothing here calls into the allocator; SNRs are rebuilt from scratch so the
oracles do not inherit its bugs.
"""

import itertools

import numpy as np
from scipy.optimize import linprog

C = 299_792_458.0


def taylor_snr(cfg, antenna, channel, f, clamp=True):
    """Center SNR under the quadratic gain model; ``clamp=False`` keeps negative values."""
    f = np.asarray(f, dtype=float)
    L = antenna.length
    fco = C / (2 * antenna.plate_separation)
    k0 = 2 * np.pi * f / C
    g = L - L**3 / 24 * k0**2 * (1 - fco**2 / (2 * f**2) - np.cos(cfg.angle)) ** 2
    rho = (C / (4 * np.pi * f)) ** 2
    loss = rho * max(channel.reference_distance, cfg.distance) ** (-channel.pathloss_exponent)
    return cfg.transmit_psd * antenna.xi * loss * (np.maximum(g, 0.0) if clamp else g) / cfg.noise_psd


def ripple_lattice(cfg, anchor):
    """Lattice points ``Lambda**k * anchor`` whose full-width subchannel fits the band.

    The anchor itself is always kept (it may have been clamped to an edge).
    Returns centers and natural widths sorted by frequency.
    """
    lam = 10 ** (cfg.ripple_db / 20)
    lo, hi = cfg.band
    k_lo = int(np.floor(np.log(lo / anchor) / np.log(lam))) - 1
    k_hi = int(np.ceil(np.log(hi / anchor) / np.log(lam))) + 1
    centers, widths = [], []
    for k in range(k_lo, k_hi + 1):
        f = anchor * lam**k
        w = 2 * f * (lam - 1) / (lam + 1)
        if k == 0 or (f - w / 2 >= lo and f + w / 2 <= hi):
            centers.append(f)
            widths.append(w)
    return np.array(centers), np.array(widths)


def lattice_items(cfg, antenna, channel, anchor):
    """Qualified lattice items: (centers, natural widths, log2(1 + SNR))."""
    f, w = ripple_lattice(cfg, anchor)
    snr = taylor_snr(cfg, antenna, channel, f)
    ok = snr >= cfg.qos_threshold
    return f[ok], w[ok], np.log2(1 + snr[ok])


def lattice_lp_optimum(cfg, antenna, channel, anchor):
    """Best ``sum b_k d_k`` with ``0 <= b_k <= w_k`` and ``sum b_k <= B_total``, via HiGHS."""
    f, w, d = lattice_items(cfg, antenna, channel, anchor)
    if len(f) == 0:
        return 0.0
    res = linprog(-d, A_ub=np.ones((1, len(f))), b_ub=[cfg.total_bandwidth],
                  bounds=list(zip(np.zeros_like(w), w)), method="highs")
    assert res.status == 0
    return float(-res.fun)


def lattice_bruteforce_optimum(cfg, antenna, channel, anchor, max_items=32):
    """Enumerate every budget-feasible subset of full-width items plus one partial item.

    Returns ``None`` when there are too many qualified items to enumerate.
    """
    f, w, d = lattice_items(cfg, antenna, channel, anchor)
    n = len(f)
    if n == 0:
        return 0.0
    if n > max_items:
        return None
    budget = cfg.total_bandwidth
    most = int(budget // w.min()) if w.min() > 0 else n
    best = float(np.max(np.minimum(w, budget) * d))  # no full item at all
    for size in range(1, min(most, n) + 1):
        idx = np.array(list(itertools.combinations(range(n), size)))
        used = w[idx].sum(axis=1)
        keep = used <= budget * (1 + 1e-12)
        if not keep.any():
            break
        idx, used = idx[keep], used[keep]
        value = (w * d)[idx].sum(axis=1)
        rem = np.maximum(budget - used, 0.0)
        chosen = np.zeros((len(idx), n), dtype=bool)
        np.put_along_axis(chosen, idx, True, axis=1)
        partial = np.where(chosen, 0.0, np.minimum(w[None, :], rem[:, None]) * d[None, :])
        best = max(best, float((value + partial.max(axis=1)).max()))
    return best


def grid_argmax(fn, lo, hi, n):
    grid = np.linspace(lo, hi, n)
    return grid[np.argmax(fn(grid))], grid[1] - grid[0]
