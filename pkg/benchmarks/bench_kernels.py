#!/usr/bin/env python3
"""Benchmark the compiled steady-state kernel against the numpy fallback.

Workload: one Doppler-averaged coupler-scan spectrum (401 axis points x 64
velocity nodes plus the bare-probe background), i.e. what one link sample
costs. Run after an editable install:

    python benchmarks/bench_kernels.py [--points N] [--nodes N] [--repeat R]
"""

import argparse
import time

import numpy as np

from rydrx import _kernels_py
from rydrx.core import DriveState, LadderConfig, build_dissipator
from rydrx.doppler import resonant_velocity_grid

try:
    from rydrx import _kernels_cy
except ImportError:
    _kernels_cy = None

TWO_PI = 2.0 * np.pi


def workload(n_points: int, n_nodes: int):
    cfg = LadderConfig()
    drive = DriveState(omega_mw=TWO_PI * 40e6)
    grid = resonant_velocity_grid(cfg, n_nodes)
    axis = np.linspace(-TWO_PI * 100e6, TWO_PI * 100e6, n_points)
    dp = np.repeat(drive.delta_p - cfg.k_probe * grid.nodes[None, :],
                   n_points, axis=0).ravel()
    dc = (-axis[:, None] + cfg.k_coupler * grid.nodes[None, :]).ravel()
    dm = np.zeros_like(dp)
    return cfg, drive, dp, dc, dm


def bench(impl, name: str, args, repeat: int) -> float:
    cfg, drive, dp, dc, dm = args
    diss = build_dissipator(cfg)
    impl.absorption_batch(dp[:64], dc[:64], dm[:64], drive.omega_p,
                          drive.omega_c, drive.omega_mw, diss)  # warm up
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        impl.absorption_batch(dp, dc, dm, drive.omega_p, drive.omega_c,
                              drive.omega_mw, diss)
        best = min(best, time.perf_counter() - t0)
    rate = dp.size / best
    print(f"{name:>8}: {best * 1e3:8.1f} ms per spectrum "
          f"({rate / 1e3:7.1f}k solves/s)")
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=401)
    parser.add_argument("--nodes", type=int, default=64)
    parser.add_argument("--repeat", type=int, default=3)
    ns = parser.parse_args()

    args = workload(ns.points, ns.nodes)
    print(f"workload: {ns.points} axis points x {ns.nodes} velocity nodes "
          f"= {ns.points * ns.nodes} dense 16x16 solves")
    t_py = bench(_kernels_py, "numpy", args, ns.repeat)
    if _kernels_cy is None:
        print("  cython: extension not built")
    else:
        t_cy = bench(_kernels_cy, "cython", args, ns.repeat)
        print(f"speedup: {t_py / t_cy:.1f}x")


if __name__ == "__main__":
    main()
