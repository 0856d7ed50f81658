"""Canonical operating points.

``experiment_*`` reproduces the demonstration cell: a strong, saturating
probe and the published beam parameters. Splitting-based (AM) readout works
there, but the AT peak heights saturate, which flattens the height
asymmetry.

``receiver_*`` is the linear-readout operating point used for
asymmetry-based (FM) reception and for the link defaults: a weak probe and
a softer coupler keep both AT transparency lines unsaturated, so the peak
heights track the dressed-state composition and the detuning retrieval law
holds; the extra Rydberg-coherence damping stands in for coupler linewidth
plus transit broadening and keeps the velocity integrand resolvable. The
tighter velocity-grid core matches the narrower resonant classes of the
weak probe.
"""

from __future__ import annotations

import math

from .core import DriveState, LadderConfig
from .doppler import VelocityGrid, resonant_velocity_grid

TWO_PI = 2.0 * math.pi

RECEIVER_VELOCITY_CORE = 20.0  # m/s


def experiment_config() -> LadderConfig:
    return LadderConfig()


def experiment_drive() -> DriveState:
    return DriveState()


def receiver_config() -> LadderConfig:
    return LadderConfig(deph_ryd=TWO_PI * 1.0e6)


def receiver_drive() -> DriveState:
    return DriveState(omega_p=TWO_PI * 0.1e6, omega_c=TWO_PI * 1.0e6)


def receiver_grid(config: LadderConfig | None = None,
                  n_nodes: int = 64) -> VelocityGrid:
    return resonant_velocity_grid(config or receiver_config(), n_nodes,
                                  core_speed=RECEIVER_VELOCITY_CORE)
