import numpy as np
import pytest

from sbwave import build_wave
from sbwave.continuation import pair_from_wave

# canonical configuration used throughout: the omega = 1 wave on [0, 13]
L_REF = 13.0
N_REF = 256


@pytest.fixture(scope="session")
def wave13():
    return build_wave(1.0, L_REF, N_REF)


@pytest.fixture(scope="session")
def pair13(wave13):
    return pair_from_wave(wave13)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
