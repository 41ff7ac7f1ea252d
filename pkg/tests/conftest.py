import numpy as np
import pytest

from floquet_chain import ChainSpec, KernelMode, StepDrive


@pytest.fixture
def small_chain():
    return ChainSpec(L=40, g=1.0, lam=20.0, kernel_mode=KernelMode.OPEN_CHAIN_EXACT)


@pytest.fixture
def fig1_drive():
    return StepDrive(a1=0.0, a2=3.5, tau=0.1 * np.pi, T=0.25 * np.pi)


@pytest.fixture
def fig2_drive():
    return StepDrive(a1=0.0, a2=36.0, tau=0.02 * np.pi, T=0.05 * np.pi)
