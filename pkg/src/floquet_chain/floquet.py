"""Floquet quasienergy spectra, mode classification, and steady-state predictions.

Two independent spectral routes:

* monodromy_spectrum -- eigenphases of the one-period propagator
  U(T) = exp(-iH(a2)(T-tau)) exp(-iH(a1)tau), exact for step drives.  The
  (complex) Schur form is used so the mode basis stays orthonormal through
  band quasi-degeneracies.

* solve_sambe -- the extended-space (Sambe) block eigenproblem, truncated at
  |k| <= K harmonics and auto-grown until the folded spectrum stabilizes.
  Both the plain construction (drive coupling (omega_l / 2) Sigma_z) and the
  rotated one (coupling g F_{l-k} on the impurity bond) are provided; they
  are gauge equivalent.  The rotated representation converges rapidly in K
  (the chain sites carry no drive there) and is the default.  Quasienergies
  are read off as the raw eigenvalues falling in the central zone
  (-omega/2, omega/2], which selects exactly one Brillouin copy per physical
  mode -- the best-converged one, with harmonic weight centred at k = 0.

Quasienergy zone convention: (-omega/2, omega/2], folding by rounding to the
nearest multiple of omega.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (GapUndefined, NonStepDrive, NotBound,
                     TruncationNotConverged, ValidationError)
from .model import ChainSpec, DriveProtocol, StepDrive, drive_fourier
from .dynamics import SuperpositionState, step_decompositions

BAND, BOUND, MARGINAL = "band", "bound", "marginal"


def fold(eps, omega: float):
    """Map energies into the fundamental zone (-omega/2, omega/2]."""
    eps = np.asarray(eps, dtype=float)
    y = eps - omega * np.round(eps / omega)
    y = np.where(y <= -omega / 2, y + omega, y)
    if y.ndim == 0:
        return float(y)
    return y


def circular_distance(a, b, omega: float):
    """Distance on the quasienergy circle of circumference omega."""
    d = np.abs(np.asarray(a) - np.asarray(b))
    return np.minimum(d, omega - d)


def match_folded(a, b, omega: float) -> float:
    """Max pairwise circular distance between two folded spectra of equal size.

    Sorted elementwise matching, minimized over cyclic shifts (values sitting
    at the zone edge may fold to opposite sides between the two inputs).
    """
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.shape != b.shape:
        raise ValidationError(f"spectra sizes differ: {a.shape} vs {b.shape}")
    best = np.inf
    for s in (0, 1, -1):
        d = circular_distance(a, np.roll(b, s), omega).max()
        best = min(best, d)
    return float(best)


def folded_band_intervals(chain: ChainSpec, omega: float):
    """Subintervals of the zone covered by the folded environment band.

    The band [lam-2J, lam+2J] is cut at the fold boundaries (half-integer
    multiples of omega) and each piece mapped into the zone.  Raises
    GapUndefined when the band wraps the whole zone (omega <= 4J).
    """
    if omega <= chain.bandwidth:
        raise GapUndefined(
            f"2pi/T = {omega:g} <= 4J = {chain.bandwidth:g}: folded band covers the zone")
    lo, hi = chain.lam - 2 * chain.J, chain.lam + 2 * chain.J
    cuts = [lo]
    b = (np.floor(lo / omega - 0.5) + 1.5) * omega   # smallest fold boundary above lo
    while b < hi - 1e-15 * omega:
        cuts.append(b)
        b += omega
    cuts.append(hi)
    out = []
    for x0, x1 in zip(cuts[:-1], cuts[1:]):
        mid = fold(0.5 * (x0 + x1), omega)
        half = 0.5 * (x1 - x0)
        out.append((mid - half, mid + half))
    return out


def distance_to_band(eps, intervals, omega: float):
    """Circular distance from each quasienergy to the folded band union (0 inside)."""
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    d = np.full(eps.shape, np.inf)
    for lo, hi in intervals:
        inside = (eps >= lo) & (eps <= hi)
        dd = np.minimum(circular_distance(eps, lo, omega),
                        circular_distance(eps, hi, omega))
        d = np.minimum(d, np.where(inside, 0.0, dd))
    return d


@dataclass
class QuasienergySpectrum:
    """Folded quasienergies with per-mode metrics and classification."""

    omega: float
    eps: np.ndarray
    solver: str
    impurity_weight: np.ndarray | None = None       # |u_0(0)|^2
    region_weight: np.ndarray | None = None         # sum_{j<=j_loc} |u_j(0)|^2
    classification: np.ndarray | None = None        # strings band/bound/marginal
    gap_distance: np.ndarray | None = None
    loc_length: np.ndarray | None = None
    convergence: dict = field(default_factory=dict)
    modes: object = None                            # backing mode set, if any

    @property
    def zone(self):
        return (-self.omega / 2, self.omega / 2)

    def bound_indices(self):
        if self.classification is None:
            return np.array([], dtype=int)
        return np.flatnonzero(self.classification == BOUND)

    def counts(self):
        if self.classification is None:
            return {}
        u, c = np.unique(self.classification, return_counts=True)
        return dict(zip(u.tolist(), c.tolist()))


class MonodromyModes:
    """Orthonormal Floquet modes of a step drive, backed by the two frozen
    spectral decompositions; u_alpha(t) inside the period is exact."""

    def __init__(self, chain: ChainSpec, drive: StepDrive):
        if not drive.is_step:
            raise NonStepDrive("monodromy route requires a step drive")
        self.chain = chain
        self.drive = drive
        (w1, v1), (w2, v2) = step_decompositions(chain, drive)
        self._w1, self._v1, self._w2, self._v2 = w1, v1, w2, v2
        U1 = (v1 * np.exp(-1j * w1 * drive.tau)) @ v1.T
        U2 = (v2 * np.exp(-1j * w2 * (drive.T - drive.tau))) @ v2.T
        U = U2 @ U1
        TT, Z = sla.schur(U, output="complex")
        mu = np.diag(TT)
        self.unitarity_defect = float(np.abs(np.abs(mu) - 1.0).max())
        self.offdiag_defect = float(np.abs(np.triu(TT, 1)).max())
        eps = fold(-np.angle(mu) / drive.T, drive.omega)
        order = np.argsort(eps)
        self.eps = eps[order]
        self.Z = Z[:, order]          # columns: u_alpha(0), orthonormal
        self._U1 = U1

    def __len__(self):
        return self.Z.shape[1]

    def overlap_x(self, i: int) -> complex:
        """x = <u_i(0)|Psi(0)> for the spin-up initial state."""
        return complex(np.conj(self.Z[0, i]))

    def u_at(self, i: int, tmod: float) -> np.ndarray:
        """Mode vector u_i(t) at 0 <= t <= T (exact piecewise propagation)."""
        d = self.drive
        v = self.Z[:, i]
        if tmod <= d.tau * (1 + 1e-12):
            psi = (self._v1 * np.exp(-1j * self._w1 * tmod)) @ (self._v1.T @ v)
        else:
            psi = (self._v2 * np.exp(-1j * self._w2 * (tmod - d.tau))) @ (
                self._v2.T @ (self._U1 @ v))
        return np.exp(1j * self.eps[i] * tmod) * psi

    def u0_series(self, i: int, nsamples: int = 200):
        """(times, u_{i,0}(t)) over one period including both endpoints."""
        d = self.drive
        ts = np.linspace(0.0, d.T, nsamples + 1)
        v = self.Z[:, i]
        y1 = self._v1.T @ v
        out = np.empty(nsamples + 1, dtype=complex)
        m1 = ts <= d.tau * (1 + 1e-12)
        out[m1] = (self._v1[0, :] * np.exp(-1j * np.outer(ts[m1], self._w1))) @ y1
        y2 = self._v2.T @ (self._U1 @ v)
        out[~m1] = (self._v2[0, :] * np.exp(-1j * np.outer(ts[~m1] - d.tau, self._w2))) @ y2
        return ts, np.exp(1j * self.eps[i] * ts) * out

    def u_series(self, i: int, nsamples: int = 200):
        """(times, u_i(t) site amplitudes (nsamples+1, L+1)) over one period."""
        d = self.drive
        ts = np.linspace(0.0, d.T, nsamples + 1)
        out = np.empty((nsamples + 1, self.chain.L + 1), dtype=complex)
        for s, t in enumerate(ts):
            out[s] = self.u_at(i, t)
        return ts, out

    def psi0_at(self, i: int, t):
        """Impurity amplitude of the mode's Schrodinger wavefunction
        e^{-i eps t} u_{i,0}(t) at arbitrary t (half-shifted frame)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        T = self.drive.T
        tmod = t - np.floor(t / T + 1e-12) * T
        out = np.empty(len(t), dtype=complex)
        for s, (tt, tm) in enumerate(zip(t, tmod)):
            out[s] = np.exp(-1j * self.eps[i] * tt) * self.u_at(i, tm)[0]
        return out

    def harmonics(self, i: int, K: int):
        """Harmonic components u~_j(k), k = -K..K, by DFT of the period series."""
        S = max(4 * K + 4, 64)
        d = self.drive
        ts = np.arange(S) * (d.T / S)
        u = np.empty((S, self.chain.L + 1), dtype=complex)
        for s, t in enumerate(ts):
            u[s] = self.u_at(i, t)
        spec = np.fft.fft(u, axis=0) / S     # coefficient of e^{-2pi i s k / S} ~ e^{+ik omega t}... see below
        # u(t) = sum_k u~(k) e^{i k omega t}; with t_s = sT/S, u~(k) = (1/S) sum_s u(t_s) e^{-2pi i k s/S}
        ks = np.arange(-K, K + 1)
        return ks, spec[ks % S, :].T          # (L+1, 2K+1)


def monodromy_spectrum(chain: ChainSpec, drive: DriveProtocol):
    """Quasienergy spectrum from the one-period propagator (exact, step drives)."""
    if not drive.is_step:
        raise NonStepDrive("monodromy route requires a step drive")
    modes = MonodromyModes(chain, drive)
    spec = QuasienergySpectrum(
        omega=drive.omega,
        eps=modes.eps.copy(),
        solver="monodromy",
        impurity_weight=np.abs(modes.Z[0, :]) ** 2,
        convergence={"unitarity_defect": modes.unitarity_defect,
                     "schur_offdiag": modes.offdiag_defect},
        modes=modes,
    )
    return spec


def _sigma_z_vector(L: int):
    sz = np.full(L + 1, -1.0)
    sz[0] = 1.0
    return sz


def sambe_matrix(chain: ChainSpec, drive: DriveProtocol, K: int) -> np.ndarray:
    """Truncated extended-space matrix, plain representation.

    Diagonal blocks H(abar) + k omega; off-diagonal blocks
    (omega_{l-k}/2) Sigma_z with Sigma_z = diag(+1, -1, ..., -1).  Hermitian
    because omega_{-m} = conj(omega_m).
    """
    if K < 1:
        raise ValidationError("K must be >= 1")
    L, w = chain.L, drive.omega
    n = L + 1
    dim = (2 * K + 1) * n
    from .model import build_effective_hamiltonian
    H0 = build_effective_hamiltonian(chain, drive.abar)
    sz = _sigma_z_vector(L)
    M = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(n)
    for ki in range(2 * K + 1):
        o = ki * n
        M[o:o + n, o:o + n] = H0
        M[o + idx, o + idx] += (ki - K) * w
        for li in range(ki + 1, 2 * K + 1):
            m = li - ki
            om = drive_fourier(drive, m)
            o2 = li * n
            M[o2 + idx, o + idx] = 0.5 * om * sz
            M[o + idx, o2 + idx] = 0.5 * np.conj(om) * sz
    return M


def sambe_matrix_rotated(chain: ChainSpec, drive: DriveProtocol, K: int) -> np.ndarray:
    """Truncated extended-space matrix in the drive-rotated frame.

    Diagonal blocks carry the undriven sites plus the impurity level
    lam + abar and k omega; the impurity bond appears with the renormalization
    coefficients, entries (1,0) = g F_{l-k} and (0,1) = g conj(F_{k-l}).
    The zero-mean scalar gauge is dropped, so the folded spectrum matches the
    plain construction and the monodromy route.
    """
    if K < 1:
        raise ValidationError("K must be >= 1")
    from .filtering import renorm_factor
    L, w = chain.L, drive.omega
    n = L + 1
    dim = (2 * K + 1) * n
    d = np.full(n, chain.lam)
    d[0] += drive.abar
    M = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(n)
    Fs = {m: renorm_factor(drive, m) for m in range(-2 * K, 2 * K + 1)}
    for ki in range(2 * K + 1):
        o = ki * n
        M[o + idx, o + idx] = d + (ki - K) * w
        for j in range(1, L):
            M[o + j, o + j + 1] = M[o + j + 1, o + j] = chain.J
        for li in range(2 * K + 1):
            m = li - ki
            o2 = li * n
            M[o2 + 1, o + 0] += chain.g * Fs[m]
            M[o2 + 0, o + 1] += chain.g * np.conj(Fs[-m])
    return M


def _sambe_sparse_rotated(chain: ChainSpec, drive: DriveProtocol, K: int):
    from .filtering import renorm_factor
    L, w = chain.L, drive.omega
    n = L + 1
    rows, cols, vals = [], [], []
    d = np.full(n, chain.lam)
    d[0] += drive.abar
    jj = np.arange(1, L)
    for ki in range(2 * K + 1):
        o = ki * n
        rows.extend(o + np.arange(n)); cols.extend(o + np.arange(n))
        vals.extend(d + (ki - K) * w)
        rows.extend(o + jj); cols.extend(o + jj + 1); vals.extend(np.full(L - 1, chain.J))
        rows.extend(o + jj + 1); cols.extend(o + jj); vals.extend(np.full(L - 1, chain.J))
        for li in range(2 * K + 1):
            m = li - ki
            F = renorm_factor(drive, m)
            o2 = li * n
            rows.append(o2 + 1); cols.append(o + 0); vals.append(chain.g * F)
            rows.append(o + 0); cols.append(o2 + 1); vals.append(chain.g * np.conj(F))
    dim = (2 * K + 1) * n
    return sp.csc_matrix((vals, (rows, cols)), shape=(dim, dim))


@dataclass(frozen=True)
class KPolicy:
    """Truncation growth policy for solve_sambe."""

    k0: int = 12
    step: int = 4
    tol: float = 1e-8
    k_max: int = 40


def _central_window_eigs(chain, drive, K, representation, want_vectors=False):
    """Raw Sambe eigenvalues in (-omega/2, omega/2]: one Brillouin copy per mode."""
    w = drive.omega
    L = chain.L
    if representation == "rotated" and not want_vectors and (2 * K + 1) * (L + 1) > 4000:
        A = _sambe_sparse_rotated(chain, drive, K)
        k = L + 1 + 8
        for _ in range(3):
            try:
                ev = spla.eigsh(A, k=k, sigma=1e-7 * w, which="LM",
                                return_eigenvectors=False)
            except RuntimeError:
                ev = spla.eigsh(A, k=k, sigma=0.11 * w, which="LM",
                                return_eigenvectors=False)
            sel = np.sort(ev[(ev > -w / 2 - 1e-12) & (ev <= w / 2 + 1e-12)])
            if len(sel) >= L + 1:
                break
            k += 16
        if len(sel) != L + 1:
            sel = sel[np.argsort(np.abs(sel))[:L + 1]] if len(sel) > L + 1 else sel
        return np.sort(sel), None
    M = sambe_matrix_rotated(chain, drive, K) if representation == "rotated" \
        else sambe_matrix(chain, drive, K)
    if want_vectors:
        ev, vec = np.linalg.eigh(M)
    else:
        ev, vec = np.linalg.eigvalsh(M), None
    m = (ev > -w / 2 - 1e-12) & (ev <= w / 2 + 1e-12)
    if vec is not None:
        return ev[m], vec[:, m]
    return ev[m], None


def solve_sambe(chain: ChainSpec, drive: DriveProtocol,
                policy: KPolicy = KPolicy(), representation: str = "rotated",
                want_modes: bool = False) -> QuasienergySpectrum:
    """Auto-converged Sambe eigensolve; folded spectrum with a convergence report.

    K grows by policy.step until the max circular shift of the folded
    spectrum falls below policy.tol; TruncationNotConverged carries the
    partial result if policy.k_max is hit first.
    """
    if representation not in ("rotated", "plain"):
        raise ValidationError(f"unknown representation {representation!r}")
    w = drive.omega
    history = []
    prev = None
    K = policy.k0
    while True:
        ev, vec = _central_window_eigs(chain, drive, K, representation,
                                       want_vectors=want_modes)
        if len(ev) != chain.L + 1:
            history.append({"K": K, "count": len(ev), "shift": None})
            prev = None
        elif prev is not None and len(prev) == len(ev):
            shift = match_folded(prev, ev, w)
            history.append({"K": K, "count": len(ev), "shift": shift})
            if shift < policy.tol:
                break
        else:
            history.append({"K": K, "count": len(ev), "shift": None})
        prev = ev
        if K >= policy.k_max:
            raise TruncationNotConverged(
                f"Sambe truncation not converged at K={K} (tol {policy.tol:g})",
                k_max=K,
                partial=QuasienergySpectrum(omega=w, eps=np.sort(ev),
                                            solver=f"sambe_{representation}",
                                            convergence={"history": history,
                                                         "converged": False}),
            )
        K += policy.step

    spec = QuasienergySpectrum(
        omega=w, eps=np.sort(ev), solver=f"sambe_{representation}",
        convergence={"history": history, "K_final": K, "converged": True,
                     "final_shift": history[-1]["shift"], "tol": policy.tol},
    )
    if want_modes and vec is not None:
        order = np.argsort(ev)
        vec = vec[:, order]
        n = chain.L + 1
        nK = vec.shape[0] // n
        comps = vec.reshape(nK, n, vec.shape[1])
        u0 = comps.sum(axis=0)          # u(0) = sum_k u~(k); rotated gauge is 1 at t=0
        norm = np.linalg.norm(u0, axis=0)
        norm[norm == 0] = 1.0
        u0 = u0 / norm
        spec.impurity_weight = np.abs(u0[0, :]) ** 2
        spec.modes = {"u0": u0, "harmonic_comps": comps}
    return spec


def _loc_length_estimate(u0_site: np.ndarray, j_fit: int = 120,
                         floor: float = 1e-24) -> float:
    """Exponential tail length from log |u_j(0)|^2, fitted above roundoff."""
    w = np.abs(u0_site) ** 2
    j = np.arange(1, min(len(w), j_fit))
    j = j[w[j] > floor]
    if len(j) < 4:
        return np.inf
    slope = np.polyfit(j, np.log(w[j]), 1)[0]
    if slope >= -1e-6:
        return np.inf
    return float(-2.0 / slope)


def default_gap_tol(chain: ChainSpec, omega: float) -> float:
    """max(1e-3 omega, 3x the folded band's finite-size level spacing 4J/L)."""
    return max(1e-3 * omega, 3.0 * chain.bandwidth / chain.L)


def classify_modes(spec: QuasienergySpectrum, chain: ChainSpec,
                   gap_tol: float | None = None, w_min: float = 0.25,
                   j_loc: int = 20) -> QuasienergySpectrum:
    """Annotate a spectrum with band/bound/marginal labels.

    Bound requires (i) circular gap distance from the folded environment band
    > gap_tol and (ii) weight on sites j <= j_loc above w_min.  Modes within
    2x gap_tol of the band edge are withheld as marginal to avoid
    classification flicker in sweeps.  Raises GapUndefined for omega <= 4J.
    """
    intervals = folded_band_intervals(chain, spec.omega)   # raises GapUndefined
    if gap_tol is None:
        gap_tol = default_gap_tol(chain, spec.omega)
    dist = distance_to_band(spec.eps, intervals, spec.omega)

    modes = spec.modes
    if isinstance(modes, MonodromyModes):
        u0 = modes.Z
    elif isinstance(modes, dict) and "u0" in modes:
        u0 = modes["u0"]
    else:
        raise ValidationError("spectrum carries no mode vectors; classification "
                              "needs impurity-region weights")
    region = np.sum(np.abs(u0[:j_loc + 1, :]) ** 2, axis=0)

    label = np.full(len(spec.eps), BAND, dtype=object)
    marginal = (dist > gap_tol) & (dist < 2.0 * gap_tol)
    in_gap = dist >= 2.0 * gap_tol
    label[marginal] = MARGINAL
    label[in_gap & (region > w_min)] = BOUND
    loc = np.full(len(spec.eps), np.inf)
    for i in np.flatnonzero(label == BOUND):
        loc[i] = _loc_length_estimate(u0[:, i])

    spec.classification = np.asarray(label, dtype=object)
    spec.gap_distance = dist
    spec.region_weight = region
    if spec.impurity_weight is None:
        spec.impurity_weight = np.abs(u0[0, :]) ** 2
    spec.loc_length = loc
    spec.convergence = dict(spec.convergence,
                            gap_tol=gap_tol, w_min=w_min, j_loc=j_loc)
    return spec


@dataclass
class FbsReport:
    """Steady-state content of the bound mode(s): P_inf(t) over one period,
    the reduced 2x2 density matrices, and the mu(t) phase specification."""

    found: bool
    times: np.ndarray
    p_infinity: np.ndarray
    rho_fbs: np.ndarray | None = None       # (S+1, 2, 2)
    mode_index: int | None = None
    quasienergy: float | None = None
    overlap_x: complex | None = None
    mu_phase: dict | None = None
    n_bound: int = 0


def fbs_steady_state(spec: QuasienergySpectrum, chain: ChainSpec,
                     drive: DriveProtocol, nsamples: int = 200) -> FbsReport:
    """P_inf(t) = |x|^2 |u_FBS,0(t)|^2 over one period (zero series if no FBS).

    With several bound modes the incoherent sum is returned and the dominant
    |x|^2 mode reported; cross terms dephase over the band average.
    """
    if spec.classification is None:
        raise ValidationError("classify_modes must run before fbs_steady_state")
    modes = spec.modes
    if not isinstance(modes, MonodromyModes):
        raise ValidationError("fbs_steady_state needs monodromy-backed modes")
    bound = spec.bound_indices()
    ts = np.linspace(0.0, drive.T, nsamples + 1)
    if len(bound) == 0:
        return FbsReport(found=False, times=ts, p_infinity=np.zeros(nsamples + 1))

    p = np.zeros(nsamples + 1)
    best, best_x2 = None, -1.0
    u0_best = None
    for i in bound:
        _, u0t = modes.u0_series(i, nsamples)
        x2 = abs(modes.overlap_x(i)) ** 2
        p += x2 * np.abs(u0t) ** 2
        if x2 > best_x2:
            best, best_x2, u0_best = int(i), x2, u0t
    rho = np.empty((nsamples + 1, 2, 2), dtype=complex)
    rho[:, 0, 0] = np.abs(u0_best) ** 2
    rho[:, 1, 1] = 1.0 - np.abs(u0_best) ** 2
    rho[:, 0, 1] = rho[:, 1, 0] = 0.0
    eps_b = float(spec.eps[best])
    return FbsReport(
        found=True, times=ts, p_infinity=p, rho_fbs=rho, mode_index=best,
        quasienergy=eps_b, overlap_x=modes.overlap_x(best),
        mu_phase={"form": "exp(i int_0^t [lam + A(t') + 2 eps_FBS]/2 dt')",
                  "lam": chain.lam, "eps_fbs": eps_b},
        n_bound=len(bound),
    )


def asymptotic_fidelity(spec: QuasienergySpectrum, chain: ChainSpec,
                        drive: DriveProtocol, state: SuperpositionState,
                        times=None) -> tuple[np.ndarray, np.ndarray]:
    """F_inf(t) = <phi| rho(inf) |phi> from the bound-mode content.

    In the half-shifted frame the cross term mu(t) Tr_E[...] collapses to the
    conjugated mode wavefunction, so

        F_inf = (1 - |a|^2 |x|^2) |b|^2
              + |a|^2 |x|^2 (|a|^2 |u0|^2 + |b|^2 (1 - |u0|^2))
              + 2 |a|^2 |b|^2 Re[ x* conj(e^{-i eps t} u0(t)) ]

    Raises NotBound when the spectrum has no bound mode.
    """
    if spec.classification is None:
        raise ValidationError("classify_modes must run before asymptotic_fidelity")
    bound = spec.bound_indices()
    if len(bound) == 0:
        raise NotBound("no bound mode in the spectrum")
    modes: MonodromyModes = spec.modes
    x2_best, i0 = -1.0, None
    for i in bound:
        x2 = abs(modes.overlap_x(i)) ** 2
        if x2 > x2_best:
            x2_best, i0 = x2, int(i)
    if times is None:
        times = np.linspace(0.0, drive.T, 201)
    times = np.asarray(times, dtype=float)
    x = modes.overlap_x(i0)
    psi0 = modes.psi0_at(i0, times)                       # e^{-i eps t} u0(t)
    u0 = psi0 * np.exp(1j * spec.eps[i0] * times)         # periodic |u0(t)|
    a2 = abs(state.alpha) ** 2
    b2 = abs(state.beta) ** 2
    x2 = abs(x) ** 2
    w2 = np.abs(u0) ** 2
    F = ((1.0 - a2 * x2) * b2
         + a2 * x2 * (a2 * w2 + b2 * (1.0 - w2))
         + 2.0 * a2 * b2 * np.real(np.conj(x) * np.conj(psi0)))
    return times, F


def mode_profile(spec: QuasienergySpectrum, index: int, t: float) -> np.ndarray:
    """Normalized site populations |u_j(t)|^2 of one mode at intra-period time t."""
    modes = spec.modes
    if isinstance(modes, MonodromyModes):
        u = modes.u_at(index, t)
    elif isinstance(modes, dict) and "harmonic_comps" in modes:
        comps = modes["harmonic_comps"]  # (2K+1, L+1, nmodes)
        nK = comps.shape[0]
        K = (nK - 1) // 2
        phases = np.exp(1j * np.arange(-K, K + 1) * spec.omega * t)
        u = np.tensordot(phases, comps[:, :, index], axes=(0, 0))
    else:
        raise ValidationError("spectrum carries no mode data")
    w = np.abs(u) ** 2
    return w / w.sum()
