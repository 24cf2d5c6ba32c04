import numpy as np
import pytest
from numpy.testing import assert_allclose

from weylbilliard.gates import (
    NamedGate,
    cartan_gate,
    cartan_matrix,
    fidelity,
    named_gate,
    pauli,
)
from weylbilliard.linalg import is_unitary, tensor

RNG = np.random.default_rng(7)


def test_pauli_algebra():
    for k in range(1, 4):
        assert_allclose(pauli(k) @ pauli(k), np.eye(2))
    # cyclic products: sigma_x sigma_y = i sigma_z and permutations
    assert_allclose(pauli(1) @ pauli(2), 1j * pauli(3))
    assert_allclose(pauli(2) @ pauli(3), 1j * pauli(1))
    assert_allclose(pauli(3) @ pauli(1), 1j * pauli(2))


def test_cartan_matrix_identity():
    assert_allclose(cartan_matrix([0.0, 0.0, 0.0]), np.eye(4))


def test_cartan_matrix_is_unitary():
    for _ in range(20):
        alpha = RNG.uniform(0, np.pi / 4, size=3)
        assert is_unitary(cartan_matrix(alpha))


def test_cartan_matrix_closed_form():
    """The product form equals the exponential of the commuting generator."""
    from scipy.linalg import expm

    alpha = np.array([0.31, 0.17, 0.05])
    gen = sum(a * tensor(pauli(k + 1), pauli(k + 1))
              for k, a in enumerate(alpha))
    assert_allclose(cartan_matrix(alpha), expm(1j * gen), atol=1e-13)


def test_combination_law():
    """Products of commuting canonical gates add their phase triples."""
    for _ in range(50):
        a, b = RNG.uniform(0, np.pi / 4, size=(2, 3))
        assert_allclose(cartan_matrix(a) @ cartan_matrix(b),
                        cartan_matrix(a + b), atol=1e-13)


def test_cartan_gate_wraps_matrix():
    g = cartan_gate([0.2, 0.1, 0.0])
    assert g.dim == 4
    assert_allclose(g.matrix, cartan_matrix([0.2, 0.1, 0.0]))


def test_named_gates_are_unitary():
    for name in NamedGate:
        assert is_unitary(named_gate(name).matrix)


def test_named_gate_accepts_strings():
    assert_allclose(named_gate("cnot").matrix, named_gate(NamedGate.CNOT).matrix)
    with pytest.raises(ValueError):
        named_gate("toffoli")


def test_cnot_matrix():
    expected = np.eye(4)[[0, 1, 3, 2]]
    assert_allclose(named_gate("cnot").matrix, expected)


def test_square_roots_square_to_their_gates():
    s = named_gate("sqrt_cnot").matrix
    assert_allclose(s @ s, named_gate("cnot").matrix, atol=1e-14)
    s = named_gate("sqrt_swap").matrix
    assert_allclose(s @ s, named_gate("swap").matrix, atol=1e-14)


def test_fidelity_range_and_phase_invariance():
    u = cartan_matrix([0.3, 0.2, 0.1])
    assert fidelity(u, u) == pytest.approx(1.0)
    assert fidelity(u, np.exp(1j * 0.7) * u) == pytest.approx(1.0)
    v = cartan_matrix([0.1, 0.0, 0.0])
    assert 0.0 <= fidelity(u, v) < 1.0
