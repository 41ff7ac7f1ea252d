"""Decoherence control of a driven spin-1/2 impurity on an XX chain.

Exact single-excitation dynamics (memory-kernel and lattice routes), Floquet
quasienergy spectra (monodromy and Sambe routes), bound-state detection and
steady-state predictions, the spectral-filtering approximation, and sweep
tooling that pairs them.
"""

__version__ = "0.1.0"

from .model import (ChainSpec, DriveProtocol, HarmonicDrive, KernelMode,
                    KernelProvenance, MemoryKernel, StepDrive,
                    build_effective_hamiltonian, chain_spectrum, drive_fourier,
                    kernel)
from .dynamics import (SuperpositionState, Trajectory, fidelity_series,
                       propagate_lattice, solve_volterra, superposition_direct)
from .floquet import (FbsReport, KPolicy, MonodromyModes, QuasienergySpectrum,
                      asymptotic_fidelity, classify_modes, fbs_steady_state,
                      fold, mode_profile, monodromy_spectrum, sambe_matrix,
                      sambe_matrix_rotated, solve_sambe)
from .filtering import (FilterReport, control_spectrum, filtered_population,
                        find_f0_zeros, renorm_factor, renormalized_dynamics,
                        spectral_density, spectral_density_binned)
from .sweep import SweepAxis, SweepPlan, convergence_report, run_sweep

__all__ = [
    "ChainSpec", "DriveProtocol", "HarmonicDrive", "KernelMode",
    "KernelProvenance", "MemoryKernel", "StepDrive",
    "build_effective_hamiltonian", "chain_spectrum", "drive_fourier", "kernel",
    "SuperpositionState", "Trajectory", "fidelity_series", "propagate_lattice",
    "solve_volterra", "superposition_direct",
    "FbsReport", "KPolicy", "MonodromyModes", "QuasienergySpectrum",
    "asymptotic_fidelity", "classify_modes", "fbs_steady_state", "fold",
    "mode_profile", "monodromy_spectrum", "sambe_matrix",
    "sambe_matrix_rotated", "solve_sambe",
    "FilterReport", "control_spectrum", "filtered_population", "find_f0_zeros",
    "renorm_factor", "renormalized_dynamics", "spectral_density",
    "spectral_density_binned",
    "SweepAxis", "SweepPlan", "convergence_report", "run_sweep",
    "__version__",
]
