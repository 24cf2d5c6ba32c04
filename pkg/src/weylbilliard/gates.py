"""Two-qubit gate constructors: Pauli algebra, the canonical nonlocal
family V(alpha) = exp(i sum_k alpha_k sigma_k (x) sigma_k), and named gates.
"""
from __future__ import annotations

import enum

import numpy as np

from .linalg import UnitaryGate, gate_matrix, tensor

# single-qubit Pauli matrices, indexed 0..3 as (I, X, Y, Z)
SIGMA0 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA0, SIGMA1, SIGMA2, SIGMA3)

# two-qubit products sigma_k (x) sigma_k
SIGMA_XX = tensor(SIGMA1, SIGMA1)
SIGMA_YY = tensor(SIGMA2, SIGMA2)
SIGMA_ZZ = tensor(SIGMA3, SIGMA3)
_EYE4 = np.eye(4, dtype=complex)


def pauli(k: int) -> np.ndarray:
    """Pauli matrix sigma_k, with sigma_0 the identity."""
    if k not in (0, 1, 2, 3):
        raise ValueError(f"pauli index must be in 0..3, got {k}")
    return PAULI[k].copy()


def cartan_matrix(alpha) -> np.ndarray:
    """4x4 matrix of V(alpha) built from its three commuting factors.

    Each factor exp(i a sigma_k (x) sigma_k) = cos(a) I + i sin(a)
    sigma_k (x) sigma_k is exact, so no matrix exponential is needed.
    """
    a = np.asarray(alpha, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"alpha must have three components, got shape {a.shape}")
    out = _EYE4
    for ak, ss in zip(a, (SIGMA_XX, SIGMA_YY, SIGMA_ZZ)):
        out = out @ (np.cos(ak) * _EYE4 + 1j * np.sin(ak) * ss)
    return out


def cartan_gate(alpha) -> UnitaryGate:
    """The canonical two-qubit gate V(alpha) as a UnitaryGate."""
    return UnitaryGate(cartan_matrix(alpha), 2)


def fidelity(u, v) -> float:
    """Phase-insensitive overlap |Tr(u^dag v)| / d of two equal-size gates."""
    mu, _ = gate_matrix(u)
    mv, _ = gate_matrix(v)
    if mu.shape != mv.shape:
        raise ValueError(f"dimension mismatch: {mu.shape} vs {mv.shape}")
    return float(abs(np.sum(np.conjugate(mu) * mv)) / mu.shape[0])


class NamedGate(enum.Enum):
    """Catalog of standard two-qubit gates."""

    IDENTITY = "identity"
    CNOT = "cnot"
    SQRT_CNOT = "sqrt_cnot"
    SWAP = "swap"
    SQRT_SWAP = "sqrt_swap"


_SQRT_X = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])

_NAMED_MATRICES = {
    NamedGate.IDENTITY: np.eye(4, dtype=complex),
    NamedGate.CNOT: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    NamedGate.SQRT_CNOT: np.block(
        [[np.eye(2, dtype=complex), np.zeros((2, 2))], [np.zeros((2, 2)), _SQRT_X]]
    ),
    NamedGate.SWAP: np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
    NamedGate.SQRT_SWAP: np.array(
        [
            [1, 0, 0, 0],
            [0, (1 + 1j) / 2, (1 - 1j) / 2, 0],
            [0, (1 - 1j) / 2, (1 + 1j) / 2, 0],
            [0, 0, 0, 1],
        ],
        dtype=complex,
    ),
}


def named_gate(name) -> UnitaryGate:
    """Look up a standard gate by NamedGate member or its string value."""
    if isinstance(name, str):
        try:
            name = NamedGate(name.lower())
        except ValueError:
            valid = ", ".join(g.value for g in NamedGate)
            raise ValueError(f"unknown gate {name!r}; expected one of {valid}")
    return UnitaryGate(_NAMED_MATRICES[name], 2)
