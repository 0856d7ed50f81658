"""Acceptance suite: every release criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to get one pass/fail
line per criterion. The full suite is heavier than the unit tests
(several minutes); each test enforces its own runtime budget.
"""

import time

import numpy as np
import pytest
from scipy.linalg import expm

from conftest import random_drive
from rydrx import presets
from rydrx.analysis import (RetrievalConstants, asymmetry, at_splitting,
                            detuning_from_asymmetry, field_from_splitting,
                            find_at_peaks, modulation_index, rabi_from_field)
from rydrx.cli import main
from rydrx.core import (DriveState, LadderConfig, build_hamiltonian,
                        build_liouvillian, check_density_matrix, steady_state,
                        unvec)
from rydrx.doppler import (ScanMode, compute_spectrum, default_axis,
                           resonant_velocity_grid)
from rydrx.errors import UnresolvedSplittingError
from rydrx.link import LinkConfig, ScanSettings, run_am_link, run_fm_link
from rydrx.modulation import (AmSignal, Arbitrary, Baseband, FmSignal,
                              Sinusoid, Square, fm_sinusoid)
from test_analysis import dressed_heights

TWO_PI = 2.0 * np.pi


def report(name: str, ok: bool, detail: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def receiver_scan(n_points=401, n_nodes=64) -> ScanSettings:
    return ScanSettings(n_points=n_points, n_velocity_nodes=n_nodes,
                        velocity_core=presets.RECEIVER_VELOCITY_CORE)


def measure_F(delta_mw: float, omega_mw: float, n_nodes: int = 64):
    cfg = presets.receiver_config()
    drive = presets.receiver_drive().replace(omega_mw=omega_mw,
                                             delta_mw=delta_mw)
    axis = default_axis(omega_mw, ScanMode.COUPLER, cfg)
    grid = presets.receiver_grid(cfg, n_nodes)
    spec = compute_spectrum(drive, ScanMode.COUPLER, axis, grid, cfg)
    return asymmetry(find_at_peaks(spec))


def test_c01_asymmetry_retrieval_round_trip():
    """Dressed-state oracle heights -> F -> detuning, exact to 1e-9."""
    t0 = time.time()
    omega = TWO_PI * 40e6
    consts = RetrievalConstants(rabi_ref=omega)
    worst = 0.0
    for delta in np.linspace(-2 * omega, 2 * omega, 201):
        _, (h_lo, h_hi) = dressed_heights(delta, omega)
        f_value = (h_hi - h_lo) / (h_hi + h_lo)
        recovered = detuning_from_asymmetry(f_value, consts)
        denom = max(abs(delta), 1e-6 * omega)
        worst = max(worst, abs(recovered - delta) / denom)
    elapsed = time.time() - t0
    report("C01 asymmetry round trip", worst < 1e-9 and elapsed < 1.0,
           f"worst relative error {worst:.2e}, {elapsed:.2f} s")


def test_c02_field_from_splitting_arithmetic():
    """f_AT = 35.52 MHz with the demonstration dipole gives 2.25 V/m."""
    e_field = field_from_splitting(35.52e6, RetrievalConstants())
    err = abs(e_field - 2.25) / 2.25
    report("C02 splitting-to-field arithmetic", err < 0.005,
           f"E = {e_field:.4f} V/m (target 2.25, rel err {err:.2e})")


def test_c03_modulation_index_arithmetic():
    k = modulation_index(3.38, 1.13)
    report("C03 modulation index", abs(k - 0.50) < 0.005,
           f"k_AM = {k:.4f} (target 0.50)")


def test_c04_asymmetric_spectra_reproduction():
    """Doppler-averaged asymmetric doublets: F(0) ~ 0, F(+-Omega) ~ -+0.71,
    strictly monotone; < 30 s per spectrum at 401 x 64."""
    omega = TWO_PI * 40e6
    t0 = time.time()
    f_zero = measure_F(0.0, omega)
    f_plus = measure_F(+omega, omega)
    f_minus = measure_F(-omega, omega)
    per_spec = (time.time() - t0) / 3.0
    deltas = np.linspace(-omega, omega, 9)
    f_curve = [measure_F(d, omega) for d in deltas]
    monotone = all(a > b for a, b in zip(f_curve, f_curve[1:]))
    ok = (abs(f_zero) < 0.02
          and abs(f_plus - (-0.71)) < 0.10
          and abs(f_minus - (+0.71)) < 0.10
          and monotone and per_spec < 30.0)
    report("C04 asymmetric spectra", ok,
           f"F(0) = {f_zero:+.4f}, F(+O) = {f_plus:+.4f}, "
           f"F(-O) = {f_minus:+.4f}, monotone = {monotone}, "
           f"{per_spec:.2f} s/spectrum")


def _splitting_slope(scan_mode: ScanMode):
    cfg = presets.receiver_config()
    drive = presets.receiver_drive()
    grid = presets.receiver_grid(cfg, 64)
    rabis = TWO_PI * np.array([10, 20, 30, 40, 50, 60]) * 1e6
    splits, used = [], []
    for om in rabis:
        axis = default_axis(om, scan_mode, cfg)
        spec = compute_spectrum(drive.replace(omega_mw=om), scan_mode, axis,
                                grid, cfg)
        try:
            splits.append(TWO_PI * at_splitting(find_at_peaks(spec)))
            used.append(om)
        except UnresolvedSplittingError:
            continue
    return np.polyfit(used, splits, 1)[0], len(used)


def test_c05_splitting_laws():
    """Coupler-scan slope 1.00 +- 0.05; probe-scan slope 0.599 +- 0.03;
    both scan modes agree within 1% in the cold (1 mK) limit."""
    slope_c, n_c = _splitting_slope(ScanMode.COUPLER)
    slope_p, n_p = _splitting_slope(ScanMode.PROBE)
    ratio = 510.0 / 852.0

    cold = LadderConfig(deph_ryd=presets.receiver_config().deph_ryd,
                        temperature=1e-3)
    om = TWO_PI * 40e6
    drive = presets.receiver_drive().replace(omega_mw=om)
    grid = resonant_velocity_grid(cold, 64)
    axis = np.linspace(-2.5 * om, 2.5 * om, 401)
    split_cold_c = TWO_PI * at_splitting(find_at_peaks(
        compute_spectrum(drive, ScanMode.COUPLER, axis, grid, cold)))
    # In the stationary limit a probe scan shows the dressed resonances as
    # enhanced-absorption dips (there is no Doppler pedestal left to carve
    # transparency from); measure their separation on the inverted signal.
    from rydrx.analysis import spectrum_baseline
    from rydrx.doppler import Spectrum
    sp = compute_spectrum(drive, ScanMode.PROBE, axis, grid, cold)
    dev = spectrum_baseline(sp) - sp.signal
    split_cold_p = TWO_PI * at_splitting(find_at_peaks(
        Spectrum(scan_mode=sp.scan_mode, axis=sp.axis, signal=dev,
                 drive=sp.drive)))
    cold_agree = abs(split_cold_p - split_cold_c) / split_cold_c

    ok = (abs(slope_c - 1.00) < 0.05 and abs(slope_p - ratio) < 0.03
          and cold_agree < 0.01)
    report("C05 splitting laws", ok,
           f"coupler slope {slope_c:.4f} ({n_c}/6), probe slope "
           f"{slope_p:.4f} ({n_p}/6, target {ratio:.4f}), cold-limit "
           f"disagreement {cold_agree:.4f}")


def test_c06_am_link_sinusoid():
    """1 Hz sinusoid, depth 0.50, E_c = 2.25 V/m, 50 Hz sampling, noiseless:
    fidelity >= 0.95 and recovered k_AM = 0.50 +- 0.02, under 5 min."""
    t0 = time.time()
    cfg = LinkConfig(
        signal=AmSignal(e_carrier=2.25,
                        baseband=Baseband(Sinusoid(freq_s=1.0, depth=0.5), 1.0)),
        ladder=presets.receiver_config(), drive_base=presets.receiver_drive(),
        scan=receiver_scan(), sampling_rate=50.0)
    result = run_am_link(cfg)
    elapsed = time.time() - t0
    valid = result.received[np.isfinite(result.received)]
    k_am = modulation_index(valid.max(), valid.min())
    ok = (result.fidelity >= 0.95 and abs(k_am - 0.50) <= 0.02
          and not result.failures and elapsed < 300.0)
    report("C06 AM sinusoid link", ok,
           f"fidelity {result.fidelity:.4f}, k_AM {k_am:.4f}, "
           f"E_c {result.calibration['e_carrier']:.4f} V/m, {elapsed:.0f} s")


def test_c07_am_link_square_wave():
    """1 Hz square wave at 20 Hz sampling: fidelity >= 0.94 and step lag
    below two sample periods."""
    rate = 20.0
    cfg = LinkConfig(
        signal=AmSignal(e_carrier=2.25,
                        baseband=Baseband(Square(freq_s=1.0, duty=0.5,
                                                 low=0.5, high=1.5), 1.0)),
        ladder=presets.receiver_config(), drive_base=presets.receiver_drive(),
        scan=receiver_scan(), sampling_rate=rate)
    result = run_am_link(cfg)
    tx, rx = result.transmitted, result.received
    # step lag: samples where the received value is still on the wrong side
    # of the midline after a transmitted transition
    mid = 0.5 * (tx.max() + tx.min())
    lag_samples = 0
    for i in range(1, tx.size):
        if (tx[i] - mid) * (tx[i - 1] - mid) < 0:  # transition at sample i
            j = i
            while j < tx.size and (rx[j] - mid) * (tx[j] - mid) < 0:
                j += 1
            lag_samples = max(lag_samples, j - i)
    ok = result.fidelity >= 0.94 and lag_samples < 2 and not result.failures
    report("C07 AM square link", ok,
           f"fidelity {result.fidelity:.4f}, step lag {lag_samples} samples")


def test_c08_fm_link_sinusoid():
    """1 Hz sinusoidal FM, amplitude 2pi x 40 MHz on a 2pi x 60 MHz carrier
    Rabi: fidelity >= 0.93 and correct sign on every confident sample."""
    cfg = LinkConfig(
        signal=FmSignal(e_carrier=3.8009,
                        baseband=fm_sinusoid(TWO_PI * 40e6, 1.0, 1.0)),
        ladder=presets.receiver_config(), drive_base=presets.receiver_drive(),
        scan=receiver_scan(), sampling_rate=50.0)
    result = run_fm_link(cfg)
    rabi_ref = result.calibration["rabi_ref"]
    confident = np.abs(result.transmitted) > 0.05 * rabi_ref
    signs_ok = bool(np.all(
        np.sign(result.received[confident])
        == np.sign(result.transmitted[confident])))
    rabi_err = abs(rabi_ref - TWO_PI * 60e6) / (TWO_PI * 60e6)
    ok = (result.fidelity >= 0.93 and signs_ok and rabi_err < 0.05
          and not result.failures)
    report("C08 FM sinusoid link", ok,
           f"fidelity {result.fidelity:.4f}, rabi_ref "
           f"{rabi_ref / TWO_PI / 1e6:.2f} MHz, signs ok = {signs_ok}")


def test_c08b_fm_link_arbitrary_waveform():
    """Multi-step arbitrary FM waveform bounded by 2pi x 40 MHz keeps
    fidelity >= 0.93 (companion case to C08)."""
    steps = np.array([0.0, 12.0, 30.0, -8.0, -36.0, 20.0, 40.0, -25.0,
                      5.0, -15.0]) * 1e6 * TWO_PI
    waveform = Arbitrary(samples=tuple(steps), sample_rate=10.0,
                         interpolation="linear")
    cfg = LinkConfig(
        signal=FmSignal(e_carrier=3.8009,
                        baseband=Baseband(waveform, 0.9)),
        ladder=presets.receiver_config(), drive_base=presets.receiver_drive(),
        scan=receiver_scan(), sampling_rate=50.0)
    result = run_fm_link(cfg)
    ok = result.fidelity >= 0.93 and not result.failures
    report("C08b FM arbitrary-waveform link", ok,
           f"fidelity {result.fidelity:.4f}")


def test_c09_physicality_suite():
    """100 random drives: steady-state physicality, agreement with direct
    time propagation to 1e-6, and velocity-quadrature convergence to 1e-3.
    Under 2 minutes."""
    t0 = time.time()
    cfg = LadderConfig()
    rng = np.random.default_rng(2024)
    rho0 = np.zeros(16, dtype=complex)
    rho0[0] = 1.0
    worst_prop = 0.0
    for _ in range(100):
        drive = random_drive(rng)
        L = build_liouvillian(build_hamiltonian(drive), cfg)
        rho = steady_state(L)
        check_density_matrix(rho)
        t_relax = 20.0 / min(cfg.gamma_r, cfg.gamma_rp)
        prop = unvec(expm(L * (2.0 * t_relax)) @ rho0)
        worst_prop = max(worst_prop, np.abs(prop - rho).max())

    # quadrature convergence on the quantities the receiver consumes
    drive = DriveState(omega_mw=TWO_PI * 40e6)
    axis = default_axis(drive.omega_mw, ScanMode.COUPLER, cfg)
    spec64 = compute_spectrum(drive, ScanMode.COUPLER, axis,
                              resonant_velocity_grid(cfg, 64), cfg)
    spec128 = compute_spectrum(drive, ScanMode.COUPLER, axis,
                               resonant_velocity_grid(cfg, 128), cfg)
    p64, p128 = find_at_peaks(spec64), find_at_peaks(spec128)
    dh = max(abs(p64.h_minus - p128.h_minus) / p128.h_minus,
             abs(p64.h_plus - p128.h_plus) / p128.h_plus)
    df = abs(asymmetry(p64) - asymmetry(p128))
    from rydrx.doppler import averaged_signal
    a64 = averaged_signal(DriveState(), resonant_velocity_grid(cfg, 64), cfg)
    a128 = averaged_signal(DriveState(), resonant_velocity_grid(cfg, 128), cfg)
    da = abs(a64 - a128) / abs(a128)
    elapsed = time.time() - t0
    ok = (worst_prop < 1e-6 and dh < 1e-3 and df < 1e-3 and da < 1e-3
          and elapsed < 120.0)
    report("C09 physicality suite", ok,
           f"propagation worst {worst_prop:.2e}, peak-height conv {dh:.2e}, "
           f"F conv {df:.2e}, averaged-signal conv {da:.2e}, {elapsed:.0f} s")


def test_c10_determinism(tmp_path):
    """Identical config + seed produce byte-identical outputs."""
    args = ["fm", "--rate-hz", "10", "--duration-s", "1", "--fm-amp-mhz",
            "25", "--e-carrier", "3.8009", "--noise-rms", "2e-6",
            "--seed", "11", "--points", "201", "--nodes", "32"]
    main([*args, "--out", str(tmp_path / "runA")])
    main([*args, "--out", str(tmp_path / "runB")])
    same = all(
        (tmp_path / "runA" / name).read_bytes()
        == (tmp_path / "runB" / name).read_bytes()
        for name in ("link_fm.csv", "link_fm.json"))
    report("C10 determinism", same, "two seeded runs byte-identical")
