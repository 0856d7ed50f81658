"""Four-level ladder master-equation core.

The receiver models a cascade g -> e -> r -> r' (cesium 6S1/2, 6P3/2,
60S1/2, 60P1/2): an optical probe on g-e, an optical coupler on e-r and a
microwave field on r-r'. In the rotating frame the Hamiltonian is

    H = [[0,     Op/2,  0,     0    ],
         [Op/2, -Dp,    Oc/2,  0    ],
         [0,     Oc/2, -(Dp+Dc),        Om/2],
         [0,     0,     Om/2, -(Dp+Dc+Dm)  ]]

with half-Rabi couplings on adjacent rungs and cumulative detunings on the
diagonal (positive detuning = field frequency above the transition).

Dissipation is standard Lindblad form, drho/dt = -i[H, rho] + sum_k D[c_k]rho,
with population decay e->g, r->e, r'->e and laser-linewidth dephasing
implemented as collective projector channels: the probe channel dephases
{e, r, r'} against g and the Rydberg channel dephases {r, r'} against
{g, e} (the microwave is treated as spectrally pure, so the r-r' coherence
is not dephased directly).

All rates and detunings are angular (rad/s). The probe absorption signal is
Im(rho_ge) expressed in units of the resonant two-level value, so the
retrieval formulas downstream only ever rely on proportionality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import SteadyStateError

TWO_PI = 2.0 * math.pi

#: Cesium-133 atomic mass (kg).
CS_MASS = 2.20694650e-25

N_LEVELS = 4
DIM = N_LEVELS * N_LEVELS

# Row-major vectorization: vec(rho)[4*i + j] = rho[i, j].
IDX_GG = 0
IDX_GE = 1


@dataclass(frozen=True)
class LadderConfig:
    """Atomic constants and decoherence rates of the ladder system.

    Rates are angular (rad/s). The Rydberg decay rates and the dephasing
    proxy for the laser linewidths are not fixed by cesium spectroscopy
    alone; the defaults below give MHz-scale EIT lines typical of
    room-temperature cells and can be overridden freely.
    """

    gamma_e: float = TWO_PI * 5.2e6      # population decay e -> g
    gamma_r: float = TWO_PI * 1.0e3      # population decay r -> e
    gamma_rp: float = TWO_PI * 1.0e3     # population decay r' -> e
    deph_probe: float = 0.0              # probe-laser linewidth proxy
    deph_ryd: float = TWO_PI * 100.0e3   # coupler-laser linewidth proxy
    lambda_p: float = 852.0e-9           # probe wavelength (m)
    lambda_c: float = 510.0e-9           # coupler wavelength (m)
    dipole_mw: float = 1.046e-26         # microwave transition dipole (C m)
    atom_mass: float = CS_MASS           # kg
    temperature: float = 300.0           # K
    carrier_freq: float = 16.98e9        # Hz, metadata only
    level_labels: tuple[str, str, str, str] = (
        "6S1/2 F=4", "6P3/2 F'=5", "60S1/2", "60P1/2")

    def __post_init__(self) -> None:
        rates = (self.gamma_e, self.gamma_r, self.gamma_rp,
                 self.deph_probe, self.deph_ryd)
        if any(not math.isfinite(r) or r < 0 for r in rates):
            raise ValueError("decay/dephasing rates must be finite and >= 0")
        if not (self.lambda_p > self.lambda_c > 0):
            raise ValueError("require lambda_p > lambda_c > 0")
        if self.dipole_mw <= 0 or self.atom_mass <= 0 or self.temperature <= 0:
            raise ValueError("dipole_mw, atom_mass and temperature must be > 0")

    @property
    def k_probe(self) -> float:
        """Probe wavenumber 2*pi/lambda_p (rad/m)."""
        return TWO_PI / self.lambda_p

    @property
    def k_coupler(self) -> float:
        return TWO_PI / self.lambda_c


@dataclass(frozen=True)
class DriveState:
    """Instantaneous drive parameters: three Rabi frequencies and three
    signed detunings, all angular (rad/s)."""

    omega_p: float = TWO_PI * 12.3e6
    omega_c: float = TWO_PI * 2.45e6
    omega_mw: float = 0.0
    delta_p: float = 0.0
    delta_c: float = 0.0
    delta_mw: float = 0.0

    def __post_init__(self) -> None:
        values = (self.omega_p, self.omega_c, self.omega_mw,
                  self.delta_p, self.delta_c, self.delta_mw)
        if any(not math.isfinite(v) for v in values):
            raise ValueError(f"drive parameters must be finite, got {values}")
        if self.omega_p < 0 or self.omega_c < 0 or self.omega_mw < 0:
            raise ValueError("Rabi frequencies must be >= 0")

    def replace(self, **kw) -> "DriveState":
        return replace(self, **kw)


def build_hamiltonian(drive: DriveState) -> np.ndarray:
    """Rotating-wave Hamiltonian of the four-level cascade (rad/s)."""
    dp, dc, dm = drive.delta_p, drive.delta_c, drive.delta_mw
    hp, hc, hm = 0.5 * drive.omega_p, 0.5 * drive.omega_c, 0.5 * drive.omega_mw
    return np.array(
        [[0.0, hp, 0.0, 0.0],
         [hp, -dp, hc, 0.0],
         [0.0, hc, -(dp + dc), hm],
         [0.0, 0.0, hm, -(dp + dc + dm)]], dtype=complex)


def collapse_operators(config: LadderConfig) -> list[np.ndarray]:
    """Lindblad operators (rates folded in, i.e. c = sqrt(rate) * A)."""
    ops = []

    def proj(i: int, j: int) -> np.ndarray:
        m = np.zeros((N_LEVELS, N_LEVELS), dtype=complex)
        m[i, j] = 1.0
        return m

    if config.gamma_e > 0:
        ops.append(math.sqrt(config.gamma_e) * proj(0, 1))
    if config.gamma_r > 0:
        ops.append(math.sqrt(config.gamma_r) * proj(1, 2))
    if config.gamma_rp > 0:
        ops.append(math.sqrt(config.gamma_rp) * proj(1, 3))
    # Collective projector channels: sqrt(2*rate)*P dephases coherences that
    # cross the projector boundary at `rate` and leaves populations alone.
    if config.deph_probe > 0:
        p = proj(1, 1) + proj(2, 2) + proj(3, 3)
        ops.append(math.sqrt(2.0 * config.deph_probe) * p)
    if config.deph_ryd > 0:
        p = proj(2, 2) + proj(3, 3)
        ops.append(math.sqrt(2.0 * config.deph_ryd) * p)
    return ops


def build_dissipator(config: LadderConfig) -> np.ndarray:
    """Dissipative part of the Liouvillian (16x16, row-major vec)."""
    eye = np.eye(N_LEVELS)
    d = np.zeros((DIM, DIM), dtype=complex)
    for c in collapse_operators(config):
        cdc = c.conj().T @ c
        d += np.kron(c, c.conj())
        d -= 0.5 * (np.kron(cdc, eye) + np.kron(eye, cdc.T))
    return d


def build_liouvillian(H: np.ndarray, config: LadderConfig) -> np.ndarray:
    """Full Liouvillian L with drho/dt = L . vec(rho) (row-major vec)."""
    H = np.asarray(H, dtype=complex)
    if H.shape != (N_LEVELS, N_LEVELS):
        raise ValueError(f"expected 4x4 Hamiltonian, got {H.shape}")
    if not np.allclose(H, H.conj().T, atol=1e-9 * max(1.0, np.abs(H).max())):
        raise ValueError("Hamiltonian must be Hermitian")
    eye = np.eye(N_LEVELS)
    coherent = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    return coherent + build_dissipator(config)


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(DIM)


def unvec(x: np.ndarray) -> np.ndarray:
    return np.asarray(x, dtype=complex).reshape(N_LEVELS, N_LEVELS)


_TRACE_ROW = np.zeros(DIM, dtype=complex)
_TRACE_ROW[:: N_LEVELS + 1] = 1.0


def steady_state(L: np.ndarray, residual_tol: float = 1e-9) -> np.ndarray:
    """Solve L . vec(rho) = 0 with unit trace by a dense linear solve.

    One row of L (the redundant d rho_gg/dt row) is replaced by the trace
    constraint, scaled to the magnitude of L for conditioning. Raises
    SteadyStateError for singular or ill-conditioned systems rather than
    returning a garbage state.
    """
    L = np.asarray(L, dtype=complex)
    scale = np.abs(L).max()
    if scale == 0.0:
        raise SteadyStateError("zero Liouvillian has no unique steady state")
    a = L.copy()
    a[IDX_GG, :] = scale * _TRACE_ROW
    b = np.zeros(DIM, dtype=complex)
    b[IDX_GG] = scale
    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SteadyStateError(f"steady-state system is singular: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise SteadyStateError("steady-state solve produced non-finite values")
    residual = np.linalg.norm(L @ x) / (np.linalg.norm(L, "fro") * np.linalg.norm(x))
    if residual > residual_tol:
        raise SteadyStateError(
            f"steady-state residual {residual:.2e} exceeds {residual_tol:.0e} "
            "(degenerate null space from vanishing decay rates?)")
    return unvec(x)


def check_density_matrix(rho: np.ndarray, herm_tol: float = 1e-10,
                         trace_tol: float = 1e-10, eig_floor: float = -1e-8) -> None:
    """Raise if rho is not a physical density matrix within tolerances."""
    rho = np.asarray(rho)
    if np.abs(rho - rho.conj().T).max() > herm_tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > trace_tol:
        raise ValueError(f"trace {np.trace(rho)} != 1")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < eig_floor:
        raise ValueError("density matrix has a significantly negative eigenvalue")


@lru_cache(maxsize=64)
def _absorption_unit(config: LadderConfig, omega_p: float) -> float:
    """Im(rho_ge) of the resonant bare two-level system at the same probe
    power; defines the dimensionless absorption unit."""
    drive = DriveState(omega_p=omega_p, omega_c=0.0, omega_mw=0.0,
                       delta_p=0.0, delta_c=0.0, delta_mw=0.0)
    L = build_liouvillian(build_hamiltonian(drive), config)
    rho = steady_state(L)
    unit = rho[0, 1].imag
    if unit <= 0:
        raise SteadyStateError("two-level normalization solve returned a "
                               "non-positive absorption")
    return unit


def probe_absorption(rho: np.ndarray, config: LadderConfig,
                     omega_p: float) -> float:
    """Probe absorption signal, Im(rho_ge), in resonant two-level units.

    The sign convention (+Im rho_ge) makes the value nonnegative for all
    physical drives under the Hamiltonian convention above.
    """
    if omega_p <= 0:
        raise ValueError("normalization requires omega_p > 0")
    return float(np.asarray(rho)[0, 1].imag / _absorption_unit(config, omega_p))
