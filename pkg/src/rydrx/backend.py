"""Kernel selection: compiled extension if available, numpy otherwise.

Set RYDRX_BACKEND=python or RYDRX_BACKEND=cython to force a choice (the
latter raises if the extension was not built).
"""

from __future__ import annotations

import os

from . import _kernels_py

_FORCED = os.environ.get("RYDRX_BACKEND", "").strip().lower()

if _FORCED in ("python", "numpy"):
    _impl = _kernels_py
    BACKEND = "numpy"
elif _FORCED == "cython":
    from . import _kernels_cy as _impl  # type: ignore[no-redef]
    BACKEND = "cython"
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "numpy"


def backend_name() -> str:
    return BACKEND


def absorption_batch(delta_p, delta_c, delta_mw, omega_p, omega_c, omega_mw,
                     dissipator):
    """Batched steady-state Im(rho_ge); see _kernels_py.absorption_batch."""
    return _impl.absorption_batch(delta_p, delta_c, delta_mw,
                                  omega_p, omega_c, omega_mw, dissipator)
