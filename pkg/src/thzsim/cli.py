"""``thzsim`` command line: run configured experiments and write CSV tables."""

from __future__ import annotations

import argparse
import csv
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analytic, netsim
from .allocation import allocate, equal_allocation, plan_rate
from .antenna import effective_gain
from .config import (
    EXPERIMENT_KINDS,
    ConfigError,
    ExperimentSpec,
    allocation_config,
    antenna_config,
    channel_config,
    load_config,
    network_scenario,
)
from .numerics import RngStream
from .power_ee import InfeasibleError, PowerConfig, allocate_power, average_ee
from .propagation import path_loss
from .units import db_to_linear, dbm_to_watts

__all__ = ["run", "main", "draw_links"]

DEFAULT_SWEEP = {
    "rate-analytic": "ro_m",
    "rate-mc": "ro_m",
    "rate-compare": "ro_m",
    "allocate-compare": "btotal_ghz",
    "power-ee": "btotal_ghz",
}


def draw_links(seed, n, r_max):
    """``n`` link geometries: angle uniform on the open interval (0, pi/2), distance on [0, r_max)."""
    gen = RngStream(seed, 0).generator()
    u = (np.floor(gen.random(n) * 2**53) + 0.5) / 2**53
    theta = 0.5 * np.pi * u
    r = r_max * gen.random(n)
    return theta, r


def _rate_row(spec, kind, seed):
    p = spec.params
    ant = antenna_config(p)
    ch = channel_config(p)
    sc = network_scenario(p, ant)
    mode = sc.interference_mode
    row = {}
    if kind in ("rate-analytic", "rate-compare"):
        row["analytic_rate_bps"] = analytic.average_rate(sc, ant, ch, mode=mode)
    if kind in ("rate-mc", "rate-compare"):
        mean, err = netsim.mean_rate(sc, ant, ch, base_seed=seed, mode=mode)
        row["mc_rate_bps"] = mean
        row["mc_stderr_bps"] = err
    if kind in ("rate-analytic", "rate-compare"):
        row["lower_bound_bps"] = analytic.average_rate_lower_bound(sc, ant, ch)
    if kind == "rate-analytic":
        row["awgn_rate_bps"] = analytic.awgn_rate(sc, ant, ch)
    return row


def _allocation_row(spec, seed):
    p = spec.params
    ant = antenna_config(p)
    ch = channel_config(p)
    thetas, dists = draw_links(seed, p["draws"], p["rmax_m"])
    proposed, equal, n_prop, n_eq = [], [], [], []
    for theta, r in zip(thetas, dists):
        cfg = allocation_config(p, theta, r)
        plan = allocate(cfg, ant, ch)
        base = equal_allocation(cfg, ant, ch, plan.count)
        proposed.append(plan_rate(plan, ant, ch, theta, r, cfg.transmit_psd, cfg.noise_psd))
        equal.append(plan_rate(base, ant, ch, theta, r, cfg.transmit_psd, cfg.noise_psd))
        n_prop.append(plan.count)
        n_eq.append(base.count)
    return {
        "proposed_rate_bps": float(np.mean(proposed)),
        "equal_rate_bps": float(np.mean(equal)),
        "proposed_N_count": float(np.mean(n_prop)),
        "equal_N_count": float(np.mean(n_eq)),
    }


def channel_to_noise(plan, antenna, channel, theta, r, noise_psd):
    """Per-subchannel ``G(f_n, theta) l(r) / sigma^2`` under the exact pattern."""
    f = plan.centers
    return effective_gain(antenna, f, theta) * path_loss(channel, f, r) / noise_psd


def _power_row(spec, seed):
    p = spec.params
    ant = antenna_config(p)
    ch = channel_config(p)
    q_max = float(dbm_to_watts(p["qmax_dbm_per_hz"]))
    q_c = float(dbm_to_watts(p["qc_dbm_per_hz"]))
    gamma = float(db_to_linear(p["gamma_th_db"]))
    thetas, dists = draw_links(seed, p["draws"], p["rmax_m"])
    proposed, equal = [], []
    for theta, r in zip(thetas, dists):
        cfg = allocation_config(p, theta, r, transmit_psd=q_max)
        plan = allocate(cfg, ant, ch)
        if not plan.count:
            continue
        xis = channel_to_noise(plan, ant, ch, theta, r, cfg.noise_psd)
        try:
            result = allocate_power(PowerConfig(tuple(xis), q_max, q_c, gamma))
        except InfeasibleError:
            continue
        ok = np.array(result.feasible)
        proposed.append(result.average_ee)
        equal.append(average_ee(np.full(ok.sum(), q_max), np.asarray(xis)[ok], q_c))
    nan = float("nan")
    return {
        "proposed_ee_bit_per_joule": float(np.mean(proposed)) if proposed else nan,
        "equal_ee_bit_per_joule": float(np.mean(equal)) if equal else nan,
        "instances_count": float(len(proposed)),
    }


def _allocate_rows(spec):
    p = spec.params
    ant = antenna_config(p)
    ch = channel_config(p)
    sc = network_scenario(p, ant)
    cfg = allocation_config(p, sc.angle, sc.distance)
    plan = allocate(cfg, ant, ch)
    return [
        {
            "subchannel_index": n + 1,
            "center_hz": e.center,
            "bandwidth_hz": e.bandwidth,
            "center_snr_linear": e.center_snr,
        }
        for n, e in enumerate(plan)
    ]


def collect_rows(spec: ExperimentSpec):
    kind = spec.kind
    if kind == "sweep":
        raise ConfigError("kind 'sweep' runs the [experiment] kind; give a concrete kind in the config")
    if kind == "allocate":
        return _allocate_rows(spec)
    key = spec.sweep_param or DEFAULT_SWEEP[kind]
    values = spec.sweep_values or (spec.params[key],)
    column = f"sweep_value_{key}"
    rows = []
    for value in values:
        point = spec.with_value(key, value)
        if kind.startswith("rate-"):
            row = _rate_row(point, kind, spec.seed)
        elif kind == "allocate-compare":
            row = _allocation_row(point, spec.seed)
        else:
            row = _power_row(point, spec.seed)
        rows.append({column: float(value) if not isinstance(value, str) else value, **row})
    return rows


def _format(value):
    if isinstance(value, (int, np.integer)):
        return str(value)
    return repr(float(value)) if isinstance(value, (float, int, np.floating)) else str(value)


def write_csv(rows, path):
    """Write rows atomically; nothing is left behind if writing fails."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            header = list(rows[0].keys()) if rows else []
            writer.writerow(header)
            for row in rows:
                writer.writerow([_format(row[k]) for k in header])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(spec: ExperimentSpec, out=None) -> int:
    """Execute ``spec`` and write its CSV; returns a process exit status."""
    out = out or spec.output
    if not out:
        raise ConfigError("no output path: set [experiment] output or pass --out")
    rows = collect_rows(spec)
    write_csv(rows, out)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="thzsim", description=__doc__)
    parser.add_argument("subcommand", choices=EXPERIMENT_KINDS)
    parser.add_argument("--config", required=True, help="experiment config (INI)")
    parser.add_argument("--out", help="CSV output path (overrides [experiment] output)")
    parser.add_argument("--seed", type=int, help="base seed (overrides [experiment] seed)")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials (overrides [network] trials)")
    parser.add_argument("--mode", choices=("windowed", "full", "off"), help="interference mode")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = load_config(args.config)
        kind = spec.kind if args.subcommand == "sweep" else args.subcommand
        params = dict(spec.params)
        if args.trials is not None:
            params["trials"] = args.trials
        if args.mode is not None:
            params["mode"] = args.mode
        spec = replace(
            spec,
            kind=kind,
            params=params,
            seed=spec.seed if args.seed is None else args.seed,
        )
        return run(spec, args.out)
    except (ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        print(f"thzsim: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
