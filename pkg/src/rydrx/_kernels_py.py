"""Vectorized numpy fallback for the steady-state hot loop.

Only the three cumulative detunings vary across a batch (the Rabi
frequencies and the dissipator are fixed per call), so the batched
Liouvillians differ from a common base matrix in 16 diagonal entries that
are linear in (delta_p, delta_c, delta_mw). The batch is assembled once and
handed to LAPACK through np.linalg.solve.
"""

from __future__ import annotations

import numpy as np

N = 4
DIM = 16

# vec index (4*i + j) -> i, j
_ROW = np.repeat(np.arange(N), N)
_COL = np.tile(np.arange(N), N)

# Cumulative-detuning coefficients per level: diag(H) = -(a*dp + b*dc + m*dm).
_A = np.array([0.0, 1.0, 1.0, 1.0])
_B = np.array([0.0, 0.0, 1.0, 1.0])
_M = np.array([0.0, 0.0, 0.0, 1.0])

# L diagonal gets -i*(diagH[i] - diagH[j]) = +i*(cum[i] - cum[j]) per unit
# detuning; precomputed per vec index.
_CP = 1j * (_A[_ROW] - _A[_COL])
_CC = 1j * (_B[_ROW] - _B[_COL])
_CM = 1j * (_M[_ROW] - _M[_COL])

_DIAG = np.arange(DIM) * (DIM + 1)  # flat indices of the 16x16 diagonal

_TRACE_ROW = np.zeros(DIM, dtype=complex)
_TRACE_ROW[:: N + 1] = 1.0

_CHUNK = 8192


def _base_liouvillian(omega_p: float, omega_c: float, omega_mw: float,
                      dissipator: np.ndarray) -> np.ndarray:
    h = np.zeros((N, N), dtype=complex)
    h[0, 1] = h[1, 0] = 0.5 * omega_p
    h[1, 2] = h[2, 1] = 0.5 * omega_c
    h[2, 3] = h[3, 2] = 0.5 * omega_mw
    eye = np.eye(N)
    return -1j * (np.kron(h, eye) - np.kron(eye, h.T)) + dissipator


def absorption_batch(delta_p: np.ndarray, delta_c: np.ndarray,
                     delta_mw: np.ndarray, omega_p: float, omega_c: float,
                     omega_mw: float, dissipator: np.ndarray) -> np.ndarray:
    """Im(rho_ge) of the steady state for each detuning triple (unnormalized).

    Parameters are angular rates; the three detuning arrays must have equal
    length. Raises FloatingPointError-free: non-finite solutions surface as
    np.nan entries for the caller to diagnose.
    """
    dp = np.ascontiguousarray(delta_p, dtype=float)
    dc = np.ascontiguousarray(delta_c, dtype=float)
    dm = np.ascontiguousarray(delta_mw, dtype=float)
    n = dp.size
    base = _base_liouvillian(omega_p, omega_c, omega_mw, dissipator)
    scale = max(np.abs(base).max(), np.abs(dp).max(initial=0.0),
                np.abs(dc).max(initial=0.0), np.abs(dm).max(initial=0.0))
    if scale == 0.0:
        raise ValueError("all drive parameters are zero")

    out = np.empty(n, dtype=float)
    rhs = np.zeros(DIM, dtype=complex)
    rhs[0] = scale
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        m = hi - lo
        batch = np.broadcast_to(base, (m, DIM, DIM)).copy()
        flat = batch.reshape(m, DIM * DIM)
        flat[:, _DIAG] += (np.outer(dp[lo:hi], _CP) + np.outer(dc[lo:hi], _CC)
                           + np.outer(dm[lo:hi], _CM))
        batch[:, 0, :] = scale * _TRACE_ROW
        try:
            sol = np.linalg.solve(batch, np.broadcast_to(rhs[:, None], (m, DIM, 1)))
            out[lo:hi] = sol[:, 1, 0].imag  # vec index of rho_ge
        except np.linalg.LinAlgError:
            # Locate the offending points instead of failing wholesale.
            for k in range(m):
                try:
                    out[lo + k] = np.linalg.solve(batch[k], rhs)[1].imag
                except np.linalg.LinAlgError:
                    out[lo + k] = np.nan
    return out
