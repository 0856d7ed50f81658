import numpy as np
import pytest

from rydrx import presets
from rydrx.core import DriveState, LadderConfig

TWO_PI = 2.0 * np.pi


@pytest.fixture(scope="session")
def cfg():
    return LadderConfig()


@pytest.fixture(scope="session")
def receiver_cfg():
    return presets.receiver_config()


@pytest.fixture(scope="session")
def receiver_drive():
    return presets.receiver_drive()


@pytest.fixture(scope="session")
def unit_cfg():
    """Rates of order one: absolute tolerances in the invariants are
    meaningful at this scale."""
    return LadderConfig(gamma_e=1.0, gamma_r=0.02, gamma_rp=0.02,
                        deph_probe=0.0, deph_ryd=0.05)


def random_drive(rng) -> DriveState:
    return DriveState(
        omega_p=rng.uniform(0.0, TWO_PI * 50e6),
        omega_c=rng.uniform(0.0, TWO_PI * 50e6),
        omega_mw=rng.uniform(0.0, TWO_PI * 50e6),
        delta_p=rng.uniform(-TWO_PI * 80e6, TWO_PI * 80e6),
        delta_c=rng.uniform(-TWO_PI * 80e6, TWO_PI * 80e6),
        delta_mw=rng.uniform(-TWO_PI * 80e6, TWO_PI * 80e6),
    )
