import numpy as np
import pytest

from floquet_chain import (ChainSpec, HarmonicDrive, KernelMode,
                           KernelProvenance, StepDrive, SuperpositionState,
                           drive_fourier, fidelity_series, propagate_lattice,
                           solve_volterra, superposition_direct)
from floquet_chain.dynamics import FRAME_SYMMETRIC, Trajectory
from floquet_chain.errors import (MissingPhaseConvention, StepNotCommensurate,
                                  ValidationError)


def lattice_on_volterra_grid(chain, drive, horizon, h):
    cells = int(round(drive.T / h))
    return propagate_lattice(chain, drive, horizon, samples_per_period=cells)


def max_dp(chain, drive, horizon, h):
    vol = solve_volterra(chain, drive, horizon, h=h)
    lat = lattice_on_volterra_grid(chain, drive, horizon, vol.meta["h"])
    n = min(len(vol.p), len(lat.p))
    return np.abs(vol.p[:n] - lat.p[:n]).max()


def test_closed_system_volterra(small_chain, fig1_drive):
    chain = ChainSpec(L=40, g=0.0, lam=20.0)
    traj = solve_volterra(chain, fig1_drive, 5.0)
    assert np.abs(np.abs(traj.c0) - 1.0).max() < 1e-12


def test_closed_system_lattice(fig1_drive):
    chain = ChainSpec(L=40, g=0.0, lam=20.0)
    traj = propagate_lattice(chain, fig1_drive, 5.0, 16)
    assert np.abs(np.abs(traj.c0) - 1.0).max() < 1e-12


def test_volterra_matches_lattice_oracle(small_chain):
    drive = StepDrive(a1=0.0, a2=36.0, tau=0.1 * np.pi, T=0.25 * np.pi)
    assert max_dp(small_chain, drive, 10.0, h=drive.T / 4000) < 1e-6


def test_volterra_second_order(small_chain):
    # halving h shrinks the error vs the lattice oracle by >= 3.5
    drive = StepDrive(a1=0.0, a2=36.0, tau=0.1 * np.pi, T=0.25 * np.pi)
    e1 = max_dp(small_chain, drive, 10.0, h=drive.T / 500)
    e2 = max_dp(small_chain, drive, 10.0, h=drive.T / 1000)
    assert e1 / e2 >= 3.5


def test_undriven_decay_monotone():
    # monotone up to band-edge ripples (amplitude ~1e-5 on the power-law tail)
    chain = ChainSpec(L=300, g=1.0, lam=20.0)
    drive = StepDrive(a1=0.0, a2=0.0, tau=0.1 * np.pi, T=0.25 * np.pi)
    traj = solve_volterra(chain, drive, 20.0)
    assert np.all(np.diff(traj.p) < 1e-4)
    means = [traj.window_mean(t, t + 2.0) for t in np.arange(0.0, 20.0, 2.0)]
    assert np.all(np.diff(means) < 0)
    assert traj.p[-1] < 0.05


def test_lattice_norm_conserved(small_chain, fig2_drive):
    traj = propagate_lattice(small_chain, fig2_drive, 50.0, 8)
    periods = 50.0 / fig2_drive.T
    assert traj.meta["norm_drift"] < 1e-13 * (small_chain.L + 1) * max(1.0, periods / 1e3)
    assert np.all(traj.p <= 1.0 + 1e-9)


def test_volterra_rejects_incommensurate_h(small_chain, fig1_drive):
    with pytest.raises(StepNotCommensurate):
        solve_volterra(small_chain, fig1_drive, 5.0, h=0.001)


def test_frame_independence_lam_shift():
    # lam -> lam + 5 shifts the whole diagonal: |c0| must be bit-for-bit stable
    drive = StepDrive(a1=0.0, a2=4.0, tau=0.1 * np.pi, T=0.25 * np.pi)
    p1 = solve_volterra(ChainSpec(L=40, lam=20.0), drive, 8.0).p
    p2 = solve_volterra(ChainSpec(L=40, lam=25.0), drive, 8.0).p
    assert np.abs(p1 - p2).max() < 1e-10
    q1 = propagate_lattice(ChainSpec(L=40, lam=20.0), drive, 8.0, 16).p
    q2 = propagate_lattice(ChainSpec(L=40, lam=25.0), drive, 8.0, 16).p
    assert np.abs(q1 - q2).max() < 1e-10


def test_continuum_kernel_volterra():
    # the Bessel kernel is the L -> infinity limit of the plane-wave mode sum;
    # below the recurrence time the finite-L ring trajectory converges onto it
    drive = StepDrive(a1=0.0, a2=2.0, tau=0.1 * np.pi, T=0.25 * np.pi)
    ring = ChainSpec(L=400, g=1.0, lam=20.0,
                     kernel_mode=KernelMode.PAPER_PLANE_WAVE)
    vd = solve_volterra(ring, drive, 15.0,
                        kernel_provenance=KernelProvenance.DISCRETE_SUM)
    vc = solve_volterra(ring, drive, 15.0,
                        kernel_provenance=KernelProvenance.CONTINUUM_BESSEL)
    assert np.abs(vd.p - vc.p).max() < 1e-3


def test_finite_size_recurrence_bound():
    # L=800 ring mode sum vs the L->infinity Bessel kernel: < 1e-3 up to 100/J
    drive = StepDrive(a1=0.0, a2=3.5, tau=0.1 * np.pi, T=0.25 * np.pi)
    ring = ChainSpec(L=800, g=1.0, lam=20.0,
                     kernel_mode=KernelMode.PAPER_PLANE_WAVE)
    h = drive.T / 1600
    vd = solve_volterra(ring, drive, 100.0, h=h)
    vc = solve_volterra(ring, drive, 100.0, h=h,
                        kernel_provenance=KernelProvenance.CONTINUUM_BESSEL)
    assert np.abs(vd.p - vc.p).max() < 1e-3


def test_harmonic_drive_paths_agree():
    # truncated-step harmonic table: split-step lattice vs harmonic Volterra
    chain = ChainSpec(L=30, g=1.0, lam=10.0)
    T = 0.5
    w = 2 * np.pi / T
    table = {0: 1.0 + 0j, 1: 0.8 - 0.3j, -1: 0.8 + 0.3j, 2: 0.2j, -2: -0.2j}
    drive = HarmonicDrive(T=T, coeffs=table)
    vol = solve_volterra(chain, drive, 4.0, h=T / 2000)
    lat = propagate_lattice(chain, drive, 4.0, samples_per_period=100,
                            substeps_per_period=2000)
    stride = 20
    n = min(len(vol.p[::stride]), len(lat.p))
    assert np.abs(vol.p[::stride][:n] - lat.p[:n]).max() < 5e-6


def test_fidelity_dark_state(small_chain, fig1_drive):
    traj = propagate_lattice(small_chain, fig1_drive, 10.0, 16)
    F = fidelity_series(traj, fig1_drive, small_chain,
                        SuperpositionState(0.0, 1.0))
    assert np.abs(F - 1.0).max() < 1e-12


def test_fidelity_alpha_one_is_population(small_chain, fig1_drive):
    traj = propagate_lattice(small_chain, fig1_drive, 10.0, 16)
    F = fidelity_series(traj, fig1_drive, small_chain,
                        SuperpositionState(1.0, 0.0))
    assert np.abs(F - traj.p).max() < 1e-12


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_fidelity_formula_vs_direct(seed, small_chain, fig1_drive):
    rng = np.random.default_rng(seed)
    a = rng.normal() + 1j * rng.normal()
    b = rng.normal() + 1j * rng.normal()
    n = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
    state = SuperpositionState(a / n, b / n)
    ts, Fd = superposition_direct(small_chain, fig1_drive, state, 10.0, 16)
    traj = propagate_lattice(small_chain, fig1_drive, 10.0, 16)
    Ff = fidelity_series(traj, fig1_drive, small_chain, state)
    assert np.abs(Fd - Ff).max() < 1e-10


def test_fidelity_symmetric_frame_conversion(small_chain, fig1_drive):
    traj = propagate_lattice(small_chain, fig1_drive, 6.0, 16)
    state = SuperpositionState(1 / np.sqrt(2), 1 / np.sqrt(2))
    F1 = fidelity_series(traj, fig1_drive, small_chain, state)
    # rebuild the same data in the symmetric frame and convert back
    B = fig1_drive.phase_integral(traj.times)
    c0_sym = traj.c0 * np.exp(+0.5j * (small_chain.lam * traj.times + B))
    traj2 = Trajectory(times=traj.times, c0=c0_sym, p=traj.p,
                       meta=dict(traj.meta, frame=FRAME_SYMMETRIC))
    F2 = fidelity_series(traj2, fig1_drive, small_chain, state)
    assert np.abs(F1 - F2).max() < 1e-12


def test_fidelity_requires_frame_tag(small_chain, fig1_drive):
    traj = propagate_lattice(small_chain, fig1_drive, 2.0, 8)
    traj.meta.pop("frame")
    with pytest.raises(MissingPhaseConvention):
        fidelity_series(traj, fig1_drive, small_chain,
                        SuperpositionState(1.0, 0.0))


def test_superposition_direct_limits(small_chain, fig1_drive):
    ts, F = superposition_direct(small_chain, fig1_drive,
                                 SuperpositionState(0.0, 1.0), 5.0, 8)
    assert np.abs(F - 1.0).max() < 1e-12
    ts, F = superposition_direct(small_chain, fig1_drive,
                                 SuperpositionState(1.0, 0.0), 5.0, 8)
    traj = propagate_lattice(small_chain, fig1_drive, 5.0, 8)
    assert np.abs(F - traj.p).max() < 1e-12


def test_superposition_state_normalization():
    with pytest.raises(ValidationError):
        SuperpositionState(1.0, 1.0)


def test_trajectory_population_bounds():
    with pytest.raises(ValidationError):
        Trajectory(times=np.array([0.0, 1.0]),
                   c0=np.array([1.0, 1.2 + 0j]),
                   p=np.array([1.0, 1.44]))
