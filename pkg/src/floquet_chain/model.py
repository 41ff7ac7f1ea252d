"""Physical model of a driven spin-1/2 impurity coupled to an XX chain.

Everything lives in the single-excitation sector, where the problem reduces
to L+1 complex amplitudes (impurity site 0, chain sites 1..L).  Units are
J = 1 and hbar = 1 throughout; energies in J, times in 1/J.

Offset convention: the single-excitation matrix is

    diag(lam + A, lam, ..., lam) + offdiag(g, J, ..., J)

i.e. global constants proportional to the identity are dropped.  Amplitudes
evolved under this matrix are tagged with frame "half_shifted"; they differ
from the bare expansion coefficients by the pure phase
exp(-(i/2) int_0^t [lam + A]).  All moduli are frame independent.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import j0

from .errors import ValidationError, HorizonBeyondRecurrence


class KernelMode(enum.Enum):
    """Mode set used for the discrete memory kernel and binned spectral density.

    PAPER_PLANE_WAVE: plane waves k_n = 2 pi n / L with uniform weights g^2/L
    (ring chain).  OPEN_CHAIN_EXACT: exact eigenmodes of the open chain,
    k_n = pi n / (L+1) with weights g^2 (2/(L+1)) sin^2 k_n; this is the mode
    set consistent with the open-chain Hamiltonian used by the lattice
    propagator, so Volterra and lattice describe the identical finite system.
    """

    PAPER_PLANE_WAVE = "plane_wave"
    OPEN_CHAIN_EXACT = "open_chain"


class KernelProvenance(enum.Enum):
    DISCRETE_SUM = "discrete_sum"
    CONTINUUM_BESSEL = "continuum_bessel"


@dataclass(frozen=True)
class ChainSpec:
    """Static model parameters.

    L: chain site count; J: nearest-neighbour hopping; g: impurity-chain
    coupling; lam: longitudinal field on every spin; x0: lattice constant,
    fixed to 1 (k is dimensionless).
    """

    L: int
    J: float = 1.0
    g: float = 1.0
    lam: float = 0.0
    kernel_mode: KernelMode = KernelMode.OPEN_CHAIN_EXACT
    x0: float = 1.0

    def __post_init__(self):
        if self.L < 2:
            raise ValidationError(f"L must be >= 2, got {self.L}")
        if self.J <= 0:
            raise ValidationError(f"J must be > 0, got {self.J}")
        if self.g < 0:
            raise ValidationError(f"g must be >= 0, got {self.g}")
        if self.x0 != 1.0:
            raise ValidationError("x0 is fixed to 1")

    @property
    def bandwidth(self) -> float:
        """Full environment bandwidth 4J."""
        return 4.0 * self.J

    @property
    def recurrence_time(self) -> float:
        """Finite-size recurrence scale L/(2J); horizons beyond it see revivals."""
        return self.L / (2.0 * self.J)


@dataclass(frozen=True)
class StepDrive:
    """Two-value periodic drive: A(t) = a1 on (nT, nT+tau], a2 on (nT+tau, (n+1)T]."""

    a1: float
    a2: float
    tau: float
    T: float

    def __post_init__(self):
        if self.T <= 0:
            raise ValidationError(f"T must be > 0, got {self.T}")
        if not (0 < self.tau < self.T):
            raise ValidationError(f"need 0 < tau < T, got tau={self.tau}, T={self.T}")

    @property
    def omega(self) -> float:
        return 2.0 * np.pi / self.T

    @property
    def abar(self) -> float:
        """Time average of A over one period."""
        return (self.a1 * self.tau + self.a2 * (self.T - self.tau)) / self.T

    @property
    def is_step(self) -> bool:
        return True

    def value(self, t):
        """A(t); at switch instants the left-closed convention of the definition."""
        t = np.asarray(t, dtype=float)
        r = t - np.floor(t / self.T) * self.T
        # map r == 0 (i.e. t = nT with n >= 1) to the end of the previous period
        r = np.where((r == 0) & (t > 0), self.T, r)
        return np.where(r <= self.tau, self.a1, self.a2)

    def phase_integral(self, t):
        """B(t) = int_0^t A(s) ds, exact piecewise-linear closed form."""
        t = np.asarray(t, dtype=float)
        n = np.floor(t / self.T)
        r = t - n * self.T
        per = self.a1 * self.tau + self.a2 * (self.T - self.tau)
        part = np.where(r <= self.tau, self.a1 * r,
                        self.a1 * self.tau + self.a2 * (r - self.tau))
        return n * per + part

    def fourier(self, l: int) -> complex:
        """Harmonic coefficient omega_l = (1/T) int_0^T A(t) e^{-i l omega t} dt.

        l = 0 is the analytic limit, the time average.  For l != 0 the closed
        form (with e^{-i 2 pi l} = 1) is
        (a1 - a2)(1 - e^{-i l omega tau}) / (2 i pi l).
        """
        if l == 0:
            return complex(self.abar)
        return (self.a1 - self.a2) * (1.0 - np.exp(-1j * l * self.omega * self.tau)) / (2j * np.pi * l)


@dataclass(frozen=True)
class HarmonicDrive:
    """Generic periodic drive given by its harmonic table A(t) = sum_l w_l e^{i l omega t}."""

    T: float
    coeffs: dict = field(default_factory=dict)  # {l: complex omega_l}

    def __post_init__(self):
        if self.T <= 0:
            raise ValidationError(f"T must be > 0, got {self.T}")
        for l, wl in self.coeffs.items():
            wm = self.coeffs.get(-l, 0.0)
            if abs(np.conj(wl) - wm) > 1e-12 * max(1.0, abs(wl)):
                raise ValidationError(f"coeffs must satisfy w(-l) = conj(w(l)); violated at l={l}")
        if abs(complex(self.coeffs.get(0, 0.0)).imag) > 1e-12:
            raise ValidationError("w(0) must be real (it is the time average)")

    @property
    def omega(self) -> float:
        return 2.0 * np.pi / self.T

    @property
    def abar(self) -> float:
        return float(np.real(self.coeffs.get(0, 0.0)))

    @property
    def is_step(self) -> bool:
        return False

    def value(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t, dtype=complex)
        for l, wl in self.coeffs.items():
            out = out + wl * np.exp(1j * l * self.omega * t)
        return np.real_if_close(out, tol=1e6).real

    def phase_integral(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t, dtype=complex)
        for l, wl in self.coeffs.items():
            if l == 0:
                out = out + wl * t
            else:
                out = out + wl * (np.exp(1j * l * self.omega * t) - 1.0) / (1j * l * self.omega)
        return out.real

    def fourier(self, l: int) -> complex:
        return complex(self.coeffs.get(l, 0.0))


# a DriveProtocol is either StepDrive or HarmonicDrive
DriveProtocol = StepDrive | HarmonicDrive


def drive_fourier(drive: DriveProtocol, l: int) -> complex:
    """Harmonic coefficient omega_l of the drive."""
    return drive.fourier(l)


def effective_tridiagonal(chain: ChainSpec, drive_value: float):
    """(diag, offdiag) bands of the single-excitation matrix for a frozen drive value."""
    d = np.full(chain.L + 1, chain.lam, dtype=float)
    d[0] += drive_value
    e = np.full(chain.L, chain.J, dtype=float)
    e[0] = chain.g
    return d, e


def build_effective_hamiltonian(chain: ChainSpec, drive_value: float) -> np.ndarray:
    """Dense real symmetric tridiagonal single-excitation matrix.

    diag(lam + A, lam, ..., lam) with off-diagonals (g, J, ..., J); bitwise
    symmetric by construction.
    """
    d, e = effective_tridiagonal(chain, drive_value)
    H = np.diag(d)
    H += np.diag(e, 1) + np.diag(e, -1)
    return H


def chain_spectrum(chain: ChainSpec):
    """Environment mode table (k_n, E_n, |g_n|^2) for the chain's kernel_mode.

    E = lam + 2J cos k.  Plane waves: k_n = 2 pi n / L (n = 0..L-1), weight
    g^2/L.  Open chain: k_n = pi n / (L+1) (n = 1..L), weight
    g^2 (2/(L+1)) sin^2 k_n.  Both weight sets sum to g^2.
    """
    L = chain.L
    if chain.kernel_mode is KernelMode.PAPER_PLANE_WAVE:
        k = 2.0 * np.pi * np.arange(L) / L
        w = np.full(L, chain.g ** 2 / L)
    else:
        k = np.pi * np.arange(1, L + 1) / (L + 1)
        w = chain.g ** 2 * (2.0 / (L + 1)) * np.sin(k) ** 2
    E = chain.lam + 2.0 * chain.J * np.cos(k)
    return k, E, w


@dataclass
class MemoryKernel:
    """Samples of the bath correlation function f(x) on a uniform grid."""

    grid: np.ndarray
    values: np.ndarray
    provenance: KernelProvenance

    def rotated(self, lam: float) -> np.ndarray:
        """f(x) e^{+i lam x}: the lam-free kernel (oscillates on the J scale only)."""
        return self.values * np.exp(1j * lam * self.grid)


def _kernel_rotated(chain: ChainSpec, x: np.ndarray,
                    provenance: KernelProvenance) -> np.ndarray:
    """f~(x) = f(x) e^{i lam x}; computed directly to avoid phase round trips."""
    if provenance is KernelProvenance.CONTINUUM_BESSEL:
        return chain.g ** 2 * j0(2.0 * chain.J * x) + 0j
    _, E, w = chain_spectrum(chain)
    # f~(x) = sum_k w_k e^{-2iJ cos(k) x}; evaluate in chunks to bound memory
    out = np.empty(len(x), dtype=complex)
    nu = E - chain.lam
    step = max(1, int(4e6 / max(len(nu), 1)))
    for i in range(0, len(x), step):
        out[i:i + step] = np.exp(-1j * np.outer(x[i:i + step], nu)) @ w
    return out


def kernel(chain: ChainSpec, grid: np.ndarray,
           provenance: KernelProvenance = KernelProvenance.DISCRETE_SUM) -> MemoryKernel:
    """Memory kernel f(x) = sum_k |g_k|^2 e^{-i E_k x} on a uniform grid from 0.

    The continuum (L -> infinity) form is f(x) = g^2 e^{-i lam x} J_0(2 J x).
    |f| is independent of lam, which enters as a pure phase.
    """
    grid = np.asarray(grid, dtype=float)
    if grid[0] != 0.0:
        raise ValidationError("kernel grid must start at 0")
    if len(grid) > 2 and not np.allclose(np.diff(grid), grid[1] - grid[0], rtol=1e-9, atol=0):
        raise ValidationError("kernel grid must be uniform")
    vals = _kernel_rotated(chain, grid, provenance) * np.exp(-1j * chain.lam * grid)
    # the weights sum to g^2 analytically; pin the x=0 sample to the exact value
    if abs(vals[0] - chain.g ** 2) > 1e-10 * max(chain.g ** 2, 1.0):
        raise RuntimeError("kernel normalization error")
    vals[0] = chain.g ** 2
    return MemoryKernel(grid=grid, values=vals, provenance=provenance)


def warn_if_beyond_recurrence(chain: ChainSpec, horizon: float,
                              provenance: KernelProvenance) -> bool:
    """Emit HorizonBeyondRecurrence when finite-size revivals can pollute the horizon."""
    if provenance is KernelProvenance.DISCRETE_SUM and horizon > chain.recurrence_time:
        warnings.warn(
            f"horizon {horizon:g} exceeds the finite-size recurrence time "
            f"~{chain.recurrence_time:g} (L={chain.L}); expect revivals",
            HorizonBeyondRecurrence,
            stacklevel=3,
        )
        return True
    return False
