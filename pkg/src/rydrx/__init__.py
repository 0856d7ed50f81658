"""rydrx: vapor-cell Rydberg EIT-AT receiver simulator.

Simulates an atom-based receiver for AM- and FM-modulated microwave
carriers: four-level Lindblad steady states, Doppler-averaged EIT-AT
spectra, and baseband retrieval from the Autler-Townes splitting and
peak-height asymmetry.
"""

from .analysis import (AtPeaks, RetrievalConstants, asymmetry, at_splitting,
                       detuning_from_asymmetry, field_from_splitting,
                       find_at_peaks, modulation_index, rabi_from_field)
from .backend import backend_name
from .core import (DriveState, LadderConfig, build_hamiltonian,
                   build_liouvillian, probe_absorption, steady_state)
from .doppler import (ScanMode, Spectrum, VelocityGrid, averaged_signal,
                      compute_spectrum, doppler_shift, make_velocity_grid,
                      resonant_velocity_grid, thermal_sigma)
from .link import (LinkConfig, LinkResult, ScanSettings, calibrate,
                   deviation_metrics, run_am_link, run_fm_link)
from .modulation import (AmSignal, Arbitrary, Baseband, FmCosine, FmSignal,
                         Sinusoid, Square, am_envelope, fm_detuning,
                         fm_sinusoid, sample_times)

__all__ = [
    "AmSignal", "Arbitrary", "AtPeaks", "Baseband", "DriveState", "FmCosine",
    "FmSignal", "LadderConfig", "LinkConfig", "LinkResult",
    "RetrievalConstants", "ScanMode", "ScanSettings", "Sinusoid", "Spectrum",
    "Square", "VelocityGrid", "am_envelope", "asymmetry", "at_splitting",
    "averaged_signal", "backend_name", "build_hamiltonian",
    "build_liouvillian", "calibrate", "compute_spectrum",
    "detuning_from_asymmetry", "deviation_metrics", "doppler_shift",
    "field_from_splitting", "find_at_peaks", "fm_detuning", "fm_sinusoid",
    "make_velocity_grid", "modulation_index", "probe_absorption",
    "rabi_from_field", "resonant_velocity_grid", "run_am_link", "run_fm_link",
    "sample_times", "steady_state", "thermal_sigma",
]

__version__ = "0.1.0"
