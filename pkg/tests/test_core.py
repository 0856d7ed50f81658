import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from conftest import random_drive
from rydrx.core import (DriveState, LadderConfig, build_hamiltonian,
                        build_liouvillian, check_density_matrix,
                        probe_absorption, steady_state, unvec, vec)
from rydrx.errors import SteadyStateError

TWO_PI = 2.0 * np.pi
MHZ = TWO_PI * 1e6


class TestHamiltonian:
    def test_zero_drive_gives_zero_matrix(self):
        d = DriveState(omega_p=0, omega_c=0, omega_mw=0)
        assert np.all(build_hamiltonian(d) == 0)

    def test_half_rabi_couplings_on_adjacent_rungs(self):
        d = DriveState(omega_p=TWO_PI * 12.3e6, omega_c=TWO_PI * 2.45e6,
                       omega_mw=0.0)
        h = build_hamiltonian(d)
        assert h[0, 1] == h[1, 0] == pytest.approx(TWO_PI * 6.15e6)
        assert h[1, 2] == h[2, 1] == pytest.approx(TWO_PI * 1.225e6)
        assert np.all(np.diag(h) == 0)
        assert h[0, 2] == h[0, 3] == h[1, 3] == 0

    def test_cumulative_detunings_on_diagonal(self):
        d = DriveState(delta_p=0.0, delta_c=TWO_PI * 10e6,
                       delta_mw=TWO_PI * 5e6)
        h = build_hamiltonian(d)
        np.testing.assert_allclose(
            np.diag(h).real, [0.0, 0.0, -TWO_PI * 10e6, -TWO_PI * 15e6])

    def test_hermitian_exactly(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            h = build_hamiltonian(random_drive(rng))
            assert np.array_equal(h, h.conj().T)

    def test_nonfinite_input_rejected(self):
        with pytest.raises(ValueError):
            DriveState(delta_p=np.inf)
        with pytest.raises(ValueError):
            DriveState(omega_p=-1.0)


def two_level_rhs(t, y, omega, delta, gamma, deph):
    """Independent 2x2 master equation, written directly in matrix form."""
    rho = y.reshape(2, 2)
    h = np.array([[0.0, omega / 2.0], [omega / 2.0, -delta]], dtype=complex)
    sm = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |g><e|
    pe = np.diag([0.0, 1.0]).astype(complex)
    out = -1j * (h @ rho - rho @ h)
    out += gamma * (sm @ rho @ sm.conj().T
                    - 0.5 * (sm.conj().T @ sm @ rho + rho @ sm.conj().T @ sm))
    out += 2.0 * deph * (pe @ rho @ pe - 0.5 * (pe @ rho + rho @ pe))
    return out.reshape(-1)


def two_level_steady_imag(omega, delta, gamma, deph):
    """Analytic saturated two-level Im(rho_ge)."""
    g_perp = 0.5 * gamma + deph
    x = 0.5 * omega**2 * g_perp / (gamma * (g_perp**2 + delta**2))
    w = 1.0 / (1.0 + 2.0 * x)  # rho_gg - rho_ee
    return 0.5 * omega * w * g_perp / (g_perp**2 + delta**2)


class TestLiouvillian:
    def test_zero_everything_gives_zero(self):
        cfg = LadderConfig(gamma_e=0, gamma_r=0, gamma_rp=0, deph_probe=0,
                           deph_ryd=0)
        L = build_liouvillian(np.zeros((4, 4)), cfg)
        assert np.all(L == 0)

    def test_single_decay_channel_population_flow(self, unit_cfg):
        cfg = LadderConfig(gamma_e=unit_cfg.gamma_e, gamma_r=0, gamma_rp=0,
                           deph_probe=0, deph_ryd=0)
        L = build_liouvillian(np.zeros((4, 4)), cfg)
        rho = np.zeros((4, 4), dtype=complex)
        rho[1, 1] = 1.0  # pure e population
        drho = unvec(L @ vec(rho))
        assert drho[1, 1].real == pytest.approx(-cfg.gamma_e)
        assert drho[0, 0].real == pytest.approx(+cfg.gamma_e)

    def test_trace_columns_vanish(self, unit_cfg):
        L = build_liouvillian(build_hamiltonian(
            DriveState(omega_p=0.7, omega_c=0.3, omega_mw=0.4,
                       delta_p=0.2, delta_c=-0.5, delta_mw=0.1)), unit_cfg)
        trace_rows = L[0::5, :].sum(axis=0)
        assert np.abs(trace_rows).max() < 1e-10

    def test_trace_preserved_for_random_states(self, cfg):
        rng = np.random.default_rng(3)
        L = build_liouvillian(build_hamiltonian(random_drive(rng)), cfg)
        scale = np.linalg.norm(L, "fro")
        for _ in range(20):
            a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            rho = a @ a.conj().T
            rho /= np.trace(rho).real
            drho = unvec(L @ vec(rho))
            assert abs(np.trace(drho)) / scale < 1e-10

    def test_negative_rates_rejected(self):
        with pytest.raises(ValueError):
            LadderConfig(gamma_e=-1.0)

    def test_non_hermitian_h_rejected(self, cfg):
        h = np.zeros((4, 4), dtype=complex)
        h[0, 1] = 1.0
        with pytest.raises(ValueError):
            build_liouvillian(h, cfg)

    def test_two_level_block_matches_direct_integration(self):
        omega, delta, gamma, deph = 0.9, -0.4, 1.0, 0.07
        cfg = LadderConfig(gamma_e=gamma, gamma_r=0, gamma_rp=0,
                           deph_probe=deph, deph_ryd=0)
        d = DriveState(omega_p=omega, omega_c=0, omega_mw=0, delta_p=delta)
        L = build_liouvillian(build_hamiltonian(d), cfg)
        rho0 = np.zeros((4, 4), dtype=complex)
        rho0[0, 0] = 1.0
        t_final = 8.0
        mine = unvec(expm(L * t_final) @ vec(rho0))
        sol = solve_ivp(two_level_rhs, (0.0, t_final),
                        np.array([1, 0, 0, 0], dtype=complex),
                        args=(omega, delta, gamma, deph),
                        rtol=1e-10, atol=1e-12)
        ref = sol.y[:, -1].reshape(2, 2)
        np.testing.assert_allclose(mine[:2, :2], ref, atol=1e-8)


class TestSteadyState:
    def test_all_drives_zero_gives_ground_state(self, cfg):
        L = build_liouvillian(build_hamiltonian(
            DriveState(omega_p=0, omega_c=0, omega_mw=0)), cfg)
        rho = steady_state(L)
        expect = np.zeros((4, 4))
        expect[0, 0] = 1.0
        np.testing.assert_allclose(rho, expect, atol=1e-12)

    def test_weak_probe_perturbative_coherence(self, cfg):
        omega_p = 0.01 * cfg.gamma_e
        cfg_bare = LadderConfig(deph_probe=0.0, deph_ryd=0.0,
                                gamma_r=cfg.gamma_r, gamma_rp=cfg.gamma_rp)
        d = DriveState(omega_p=omega_p, omega_c=0, omega_mw=0)
        rho = steady_state(build_liouvillian(build_hamiltonian(d), cfg_bare))
        expect = omega_p / cfg_bare.gamma_e
        assert rho[0, 1].imag == pytest.approx(expect, rel=0.01)
        assert rho[0, 1].imag > 0  # package sign convention

    def test_saturated_two_level_matches_analytic(self):
        omega, delta, gamma, deph = 1.7, 0.6, 1.0, 0.11
        # tiny Rydberg decay keeps the undriven upper levels from forming a
        # degenerate (singular) block; they hold no population
        cfg = LadderConfig(gamma_e=gamma, gamma_r=1e-3, gamma_rp=1e-3,
                           deph_probe=deph, deph_ryd=0)
        d = DriveState(omega_p=omega, omega_c=0, omega_mw=0, delta_p=delta)
        rho = steady_state(build_liouvillian(build_hamiltonian(d), cfg))
        assert rho[0, 1].imag == pytest.approx(
            two_level_steady_imag(omega, delta, gamma, deph), rel=1e-10)

    def test_ideal_eit_dark_state_is_transparent(self):
        cfg = LadderConfig(gamma_r=0.0, deph_probe=0.0, deph_ryd=0.0)
        d = DriveState(omega_mw=0.0)  # default probe/coupler, resonant
        rho = steady_state(build_liouvillian(build_hamiltonian(d), cfg))
        assert abs(rho[0, 1].imag) < 1e-6

    def test_zero_liouvillian_raises(self):
        with pytest.raises(SteadyStateError):
            steady_state(np.zeros((16, 16), dtype=complex))

    def test_no_decay_degenerate_system_raises(self):
        cfg = LadderConfig(gamma_e=0, gamma_r=0, gamma_rp=0, deph_probe=0,
                           deph_ryd=0)
        L = build_liouvillian(build_hamiltonian(DriveState()), cfg)
        with pytest.raises(SteadyStateError):
            steady_state(L)

    def test_physicality_over_random_drives(self, cfg):
        rng = np.random.default_rng(11)
        for _ in range(25):
            L = build_liouvillian(build_hamiltonian(random_drive(rng)), cfg)
            rho = steady_state(L)
            check_density_matrix(rho)

    def test_matches_long_time_propagation(self, cfg):
        rng = np.random.default_rng(5)
        rho0 = np.zeros(16, dtype=complex)
        rho0[0] = 1.0
        for _ in range(5):
            L = build_liouvillian(build_hamiltonian(random_drive(rng)), cfg)
            rho_ss = steady_state(L)
            t = 20.0 / min(cfg.gamma_r, cfg.gamma_rp)
            prop = expm(L * t) @ rho0
            prop2 = expm(L * (2 * t)) @ rho0
            assert np.abs(prop - prop2).max() < 1e-9
            np.testing.assert_allclose(unvec(prop2), rho_ss, atol=1e-6)


def three_level_weak_probe_imag(omega_p, omega_c, delta_p, delta_c, cfg):
    """Linear-response ladder EIT coherence (continued-fraction form)."""
    g_ge = 0.5 * cfg.gamma_e + cfg.deph_probe
    g_gr = 0.5 * cfg.gamma_r + cfg.deph_probe + cfg.deph_ryd
    denom = (g_ge + 1j * delta_p
             + (omega_c**2 / 4.0) / (g_gr + 1j * (delta_p + delta_c)))
    return (0.5j * omega_p / denom).imag


class TestProbeAbsorption:
    def test_ground_state_gives_zero(self, cfg):
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = 1.0
        assert probe_absorption(rho, cfg, DriveState().omega_p) == 0.0

    def test_resonant_two_level_normalized_to_one(self, cfg):
        d = DriveState(omega_c=0, omega_mw=0)
        rho = steady_state(build_liouvillian(build_hamiltonian(d), cfg))
        assert probe_absorption(rho, cfg, d.omega_p) == pytest.approx(1.0)

    def test_resonant_eit_reduces_absorption(self):
        for deph, bound in [(TWO_PI * 300e3, None), (TWO_PI * 30e3, None)]:
            cfg = LadderConfig(deph_ryd=deph)
            d = DriveState(omega_p=TWO_PI * 0.05e6, omega_mw=0.0)
            rho = steady_state(build_liouvillian(build_hamiltonian(d), cfg))
            value = probe_absorption(rho, cfg, d.omega_p)
            assert 0.0 < value < 1.0
            expect = (three_level_weak_probe_imag(
                d.omega_p, d.omega_c, 0.0, 0.0, cfg)
                / three_level_weak_probe_imag(d.omega_p, 0.0, 0.0, 0.0, cfg))
            assert value == pytest.approx(expect, rel=0.02)

    def test_less_rydberg_dephasing_means_deeper_transparency(self):
        values = []
        for deph in [TWO_PI * 1e6, TWO_PI * 100e3, TWO_PI * 10e3]:
            cfg = LadderConfig(deph_ryd=deph)
            d = DriveState(omega_mw=0.0)
            rho = steady_state(build_liouvillian(build_hamiltonian(d), cfg))
            values.append(probe_absorption(rho, cfg, d.omega_p))
        assert values[0] > values[1] > values[2] > 0


class TestDressedResonance:
    def test_r_manifold_minima_at_at_eigenvalues(self):
        """Weak probe + weak coupler: the two absorption minima of a raw
        coupler sweep sit at (-dm +- sqrt(dm^2 + om^2))/2."""
        cfg = LadderConfig(deph_ryd=TWO_PI * 50e3)
        om, dm = TWO_PI * 30e6, TWO_PI * 18e6
        sweep = np.linspace(-TWO_PI * 60e6, TWO_PI * 60e6, 1201)
        vals = []
        for dc in sweep:
            d = DriveState(omega_p=TWO_PI * 0.05e6, omega_c=TWO_PI * 0.4e6,
                           omega_mw=om, delta_c=dc, delta_mw=dm)
            rho = steady_state(build_liouvillian(build_hamiltonian(d), cfg))
            vals.append(rho[0, 1].imag)
        vals = np.asarray(vals)
        root = np.sqrt(dm**2 + om**2)
        expected = sorted([0.5 * (-dm - root), 0.5 * (-dm + root)])
        # the two deepest local minima
        mins = [i for i in range(1, len(vals) - 1)
                if vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1]]
        mins.sort(key=lambda i: vals[i])
        found = sorted(sweep[i] for i in mins[:2])
        for f, e in zip(found, expected):
            assert abs(f - e) < 0.02 * om
