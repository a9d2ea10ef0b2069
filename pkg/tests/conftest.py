import numpy as np
import pytest

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
PAULI_MATS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def kron_all(labels: str) -> np.ndarray:
    """Dense matrix of a Pauli label string (leftmost letter = qubit 0)."""
    out = np.array([[1]], dtype=complex)
    for ch in labels:
        out = np.kron(out, PAULI_MATS[ch])
    return out


@pytest.fixture(scope="session")
def polyset():
    from c4distill.enumeration import derive_polynomials

    return derive_polynomials()


@pytest.fixture(scope="session")
def models():
    from c4distill.routines import builtin_models

    return builtin_models()
