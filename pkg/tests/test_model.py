import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from floquet_chain import (ChainSpec, HarmonicDrive, KernelMode,
                           KernelProvenance, StepDrive,
                           build_effective_hamiltonian, chain_spectrum,
                           drive_fourier, kernel)
from floquet_chain.errors import HorizonBeyondRecurrence, ValidationError
from floquet_chain.model import warn_if_beyond_recurrence


def test_effective_hamiltonian_direct_transcription():
    chain = ChainSpec(L=2, J=1.0, g=0.5, lam=3.0)
    H = build_effective_hamiltonian(chain, 2.0)
    assert np.array_equal(np.diag(H), [5.0, 3.0, 3.0])
    assert np.array_equal(np.diag(H, 1), [0.5, 1.0])


def test_effective_hamiltonian_bitwise_symmetric():
    chain = ChainSpec(L=17, J=1.0, g=0.7319, lam=4.577)
    H = build_effective_hamiltonian(chain, 1.234)
    assert np.array_equal(H, H.T)


def test_g_zero_decouples_impurity():
    chain = ChainSpec(L=6, g=0.0, lam=1.0)
    H = build_effective_hamiltonian(chain, 0.3)
    assert np.all(H[0, 1:] == 0.0) and np.all(H[1:, 0] == 0.0)


def test_chain_block_fills_band():
    # open chain, impurity decoupled: eigenvalues converge onto [lam-2J, lam+2J]
    lam, J = 20.0, 1.0
    chain = ChainSpec(L=600, J=J, g=0.0, lam=lam)
    H = build_effective_hamiltonian(chain, 0.0)
    w = np.linalg.eigvalsh(H[1:, 1:])
    assert w.min() > lam - 2 * J and w.max() < lam + 2 * J
    assert w.min() < lam - 2 * J + 1e-3 and w.max() > lam + 2 * J - 1e-3


def test_chain_spectrum_plane_wave_top_mode():
    chain = ChainSpec(L=800, lam=20.0, kernel_mode=KernelMode.PAPER_PLANE_WAVE)
    _, E, _ = chain_spectrum(chain)
    assert E[0] == pytest.approx(22.0)   # n = 0: E = lam + 2J


def test_chain_spectrum_small_ring():
    chain = ChainSpec(L=4, lam=3.0, kernel_mode=KernelMode.PAPER_PLANE_WAVE)
    _, E, _ = chain_spectrum(chain)
    assert sorted(np.round(E - 3.0, 12)) == [-2.0, 0.0, 0.0, 2.0]


@pytest.mark.parametrize("mode", list(KernelMode))
def test_coupling_weights_complete(mode):
    chain = ChainSpec(L=37, g=0.83, lam=1.0, kernel_mode=mode)
    _, _, w = chain_spectrum(chain)
    assert w.sum() == pytest.approx(chain.g ** 2, rel=1e-12)


def test_kernel_at_zero_is_g_squared():
    chain = ChainSpec(L=50, g=0.6, lam=5.0)
    k = kernel(chain, np.linspace(0, 10, 101))
    assert k.values[0] == chain.g ** 2


def test_kernel_continuum_vs_discrete():
    # oracle: direct mode sum at large L approximates the Bessel continuum form
    grid = np.linspace(0.0, 20.0, 801)
    chain = ChainSpec(L=10_000, g=1.0, lam=7.0,
                      kernel_mode=KernelMode.PAPER_PLANE_WAVE)
    disc = kernel(chain, grid, KernelProvenance.DISCRETE_SUM)
    cont = kernel(chain, grid, KernelProvenance.CONTINUUM_BESSEL)
    assert np.abs(disc.values - cont.values).max() < 1e-3 * chain.g ** 2


def test_kernel_modulus_independent_of_lam():
    grid = np.linspace(0.0, 15.0, 301)
    k1 = kernel(ChainSpec(L=64, g=1.0, lam=3.0), grid)
    k2 = kernel(ChainSpec(L=64, g=1.0, lam=8.0), grid)
    assert np.abs(np.abs(k1.values) - np.abs(k2.values)).max() < 1e-12


def test_kernel_finite_size_revival():
    # plane-wave kernel revives near x = L/(2J)
    chain = ChainSpec(L=200, g=1.0, lam=0.0, kernel_mode=KernelMode.PAPER_PLANE_WAVE)
    grid = np.linspace(0.0, 130.0, 2601)
    vals = np.abs(kernel(chain, grid).values)
    mid = vals[(grid > 40) & (grid < 70)].max()
    reviv = vals[(grid > 0.8 * 100) & (grid < 1.2 * 100)].max()
    assert reviv > 2.5 * mid


def test_drive_fourier_time_average():
    d = StepDrive(a1=0.0, a2=2.0, tau=0.1 * np.pi, T=0.25 * np.pi)
    assert drive_fourier(d, 0) == pytest.approx(1.2)


def test_constant_drive_single_harmonic():
    d = StepDrive(a1=1.7, a2=1.7, tau=0.3, T=1.0)
    assert drive_fourier(d, 0) == pytest.approx(1.7)
    for l in range(1, 6):
        assert abs(drive_fourier(d, l)) < 1e-15


@settings(deadline=None)
@given(a1=st.floats(-30, 30), a2=st.floats(-30, 30),
       frac=st.floats(0.05, 0.95), T=st.floats(0.1, 3.0),
       l=st.integers(1, 10))
def test_drive_fourier_hermitian(a1, a2, frac, T, l):
    d = StepDrive(a1=a1, a2=a2, tau=frac * T, T=T)
    assert drive_fourier(d, -l) == pytest.approx(np.conj(drive_fourier(d, l)),
                                                 abs=1e-12)


def test_parseval_partial_sums_monotone():
    d = StepDrive(a1=0.0, a2=2.0, tau=0.1 * np.pi, T=0.25 * np.pi)
    target = (d.a1 ** 2 * d.tau + d.a2 ** 2 * (d.T - d.tau)) / d.T
    prev = -np.inf
    rema = []
    for M in (4, 16, 64, 256, 1024):
        s = sum(abs(drive_fourier(d, l)) ** 2 for l in range(-M, M + 1))
        assert s >= prev
        prev = s
        rema.append(target - s)
    assert all(r > 0 for r in rema)            # partial sums approach from below
    assert rema[-1] < rema[0] / 50 and rema[-1] < 1e-3 * target


def test_harmonic_drive_matches_step_fourier():
    step = StepDrive(a1=0.5, a2=2.5, tau=0.4, T=1.0)
    table = {l: drive_fourier(step, l) for l in range(-40, 41)}
    h = HarmonicDrive(T=step.T, coeffs=table)
    assert h.abar == pytest.approx(step.abar)
    ts = np.linspace(0.05, 0.95, 19)
    # truncated Fourier synthesis approaches the step away from the jumps
    mask = (np.abs(ts - step.tau) > 0.08) & (ts < step.T - 0.08)
    assert np.abs(h.value(ts) - step.value(ts))[mask].max() < 0.06


def test_harmonic_drive_rejects_non_hermitian_table():
    with pytest.raises(ValidationError):
        HarmonicDrive(T=1.0, coeffs={1: 1.0 + 0j, -1: 2.0 + 0j})


@pytest.mark.parametrize("bad", [
    dict(L=1), dict(J=0.0), dict(J=-1.0), dict(g=-0.1), dict(x0=2.0),
])
def test_chain_validation(bad):
    kw = dict(L=10, J=1.0, g=1.0, lam=0.0)
    kw.update(bad)
    with pytest.raises(ValidationError):
        ChainSpec(**kw)


@pytest.mark.parametrize("bad", [
    dict(T=0.0), dict(T=-1.0), dict(tau=0.0), dict(tau=1.0), dict(tau=1.5),
])
def test_step_drive_validation(bad):
    kw = dict(a1=0.0, a2=1.0, tau=0.5, T=1.0)
    kw.update(bad)
    with pytest.raises(ValidationError):
        StepDrive(**kw)


def test_recurrence_warning():
    chain = ChainSpec(L=40)
    with pytest.warns(HorizonBeyondRecurrence):
        warn_if_beyond_recurrence(chain, 100.0, KernelProvenance.DISCRETE_SUM)
    assert not warn_if_beyond_recurrence(chain, 10.0, KernelProvenance.DISCRETE_SUM)
    assert not warn_if_beyond_recurrence(chain, 100.0, KernelProvenance.CONTINUUM_BESSEL)
