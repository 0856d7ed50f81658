# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled steady-state kernel.

Same contract as rydrx._kernels_py.absorption_batch: for each detuning
triple, assemble the 16x16 Liouvillian (base matrix + diagonal detuning
terms + trace row) and solve with LAPACK zgesv. Matrices are kept in
column-major order; the per-point work is a memcpy plus 16 diagonal
updates, so zgesv dominates.
"""

import numpy as np

cimport numpy as cnp
from libc.string cimport memcpy
from scipy.linalg.cython_lapack cimport zgesv

from . import _kernels_py

cnp.import_array()

cdef int DIM = 16


def absorption_batch(delta_p, delta_c, delta_mw,
                     double omega_p, double omega_c, double omega_mw,
                     dissipator):
    dp_arr = np.ascontiguousarray(delta_p, dtype=np.float64)
    dc_arr = np.ascontiguousarray(delta_c, dtype=np.float64)
    dm_arr = np.ascontiguousarray(delta_mw, dtype=np.float64)
    if not (dp_arr.shape == dc_arr.shape == dm_arr.shape):
        raise ValueError("detuning arrays must have equal shapes")

    base = _kernels_py._base_liouvillian(omega_p, omega_c, omega_mw, dissipator)
    cdef double scale = max(np.abs(base).max(), np.abs(dp_arr).max(initial=0.0),
                            np.abs(dc_arr).max(initial=0.0),
                            np.abs(dm_arr).max(initial=0.0))
    if scale == 0.0:
        raise ValueError("all drive parameters are zero")

    base_f = np.asfortranarray(base, dtype=np.complex128)
    cp_arr = np.ascontiguousarray(_kernels_py._CP, dtype=np.complex128)
    cc_arr = np.ascontiguousarray(_kernels_py._CC, dtype=np.complex128)
    cm_arr = np.ascontiguousarray(_kernels_py._CM, dtype=np.complex128)
    out_arr = np.empty(dp_arr.size, dtype=np.float64)

    cdef double[::1] dp = dp_arr.ravel()
    cdef double[::1] dc = dc_arr.ravel()
    cdef double[::1] dm = dm_arr.ravel()
    cdef double[::1] out = out_arr
    cdef double complex[::1] base_v = base_f.ravel(order="K")
    cdef double complex[::1] cp = cp_arr
    cdef double complex[::1] cc = cc_arr
    cdef double complex[::1] cm = cm_arr

    cdef double complex work[256]
    cdef double complex rhs[16]
    cdef int ipiv[16]
    cdef int n = DIM, nrhs = 1, info = 0
    cdef Py_ssize_t k, t, j
    cdef Py_ssize_t npts = dp.shape[0]
    cdef double nan = float("nan")

    with nogil:
        for k in range(npts):
            memcpy(work, &base_v[0], 256 * sizeof(double complex))
            for t in range(DIM):
                work[t * 17] = (work[t * 17] + cp[t] * dp[k]
                                + cc[t] * dc[k] + cm[t] * dm[k])
            # Replace the d rho_gg/dt row (row 0) with the trace constraint.
            for j in range(DIM):
                work[j * 16] = 0.0
            work[0] = scale
            work[5 * 16] = scale
            work[10 * 16] = scale
            work[15 * 16] = scale
            for j in range(DIM):
                rhs[j] = 0.0
            rhs[0] = scale
            zgesv(&n, &nrhs, work, &n, ipiv, rhs, &n, &info)
            out[k] = rhs[1].imag if info == 0 else nan
    return out_arr
