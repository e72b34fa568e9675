import numpy as np
import pytest

from xycorr.qstate import validate_state

S = 1 / np.sqrt(2)


def ket_state(*amps):
    psi = np.array(amps, dtype=complex)
    psi /= np.linalg.norm(psi)
    return validate_state(np.outer(psi, psi.conj()))


@pytest.fixture
def phi_plus():
    return ket_state(S, 0, 0, S)


@pytest.fixture
def bells():
    return [
        ket_state(S, 0, 0, S),
        ket_state(S, 0, 0, -S),
        ket_state(0, S, S, 0),
        ket_state(0, S, -S, 0),
    ]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
