import numpy as np
import pytest
from numpy.testing import assert_allclose

from weylbilliard.linalg import (
    UnitaryGate,
    UnitaryPowers,
    eigenvalues_unitary,
    is_unitary,
    matrix_power,
    tensor,
    unitarity_defect,
)
from weylbilliard.ensembles import RandomStream, ginibre, haar_unitary

RNG = np.random.default_rng(20240811)


def random_unitary(d):
    return haar_unitary(d, RandomStream(int(RNG.integers(2**31))))


def test_tensor_matches_kron():
    a = RNG.normal(size=(3, 3)) + 1j * RNG.normal(size=(3, 3))
    b = RNG.normal(size=(2, 2))
    assert_allclose(tensor(a, b), np.kron(a, b))


def test_tensor_of_unitaries_is_unitary():
    u = tensor(random_unitary(2), random_unitary(2))
    assert is_unitary(u)


def test_unitarity_defect():
    u = random_unitary(4)
    assert unitarity_defect(u) < 1e-12
    g = ginibre(4, RandomStream(5))
    assert unitarity_defect(g) > 0.1


def test_gate_validates_unitarity():
    u = random_unitary(4)
    UnitaryGate(u)
    with pytest.raises(ValueError):
        UnitaryGate(u + 1e-6 * ginibre(4, RandomStream(1)))


def test_gate_rejects_bad_shapes():
    with pytest.raises(ValueError):
        UnitaryGate(np.eye(4)[:3])
    # gates live on N x N systems; d = 6 admits no equal split
    with pytest.raises(ValueError):
        UnitaryGate(np.eye(6))
    with pytest.raises(ValueError):
        UnitaryGate(np.eye(6), subsystem_dim=2)


def test_gate_matrix_is_read_only():
    g = UnitaryGate(np.eye(4))
    with pytest.raises(ValueError):
        g.matrix[0, 0] = 2.0


def test_gate_matmul_and_dagger():
    a, b = random_unitary(4), random_unitary(4)
    ga, gb = UnitaryGate(a), UnitaryGate(b)
    assert_allclose((ga @ gb).matrix, a @ b, atol=1e-14)
    assert_allclose((ga @ ga.dagger()).matrix, np.eye(4), atol=1e-12)


def test_integer_powers_match_matrix_power():
    u = random_unitary(6)
    powers = UnitaryPowers(u)
    for t in (0, 1, 2, 7, 13):
        assert_allclose(powers.power(t), np.linalg.matrix_power(u, t),
                        atol=1e-11)


def test_fractional_powers_interpolate():
    u = random_unitary(4)
    powers = UnitaryPowers(u)
    half = powers.power(0.5)
    assert is_unitary(half)
    assert_allclose(half @ half, u, atol=1e-12)


def test_power_stack_matches_single_powers():
    u = random_unitary(5)
    powers = UnitaryPowers(u)
    ts = np.array([1.0, 2.0, 3.5, 10.0])
    stack = powers.power_stack(ts)
    for k, t in enumerate(ts):
        assert_allclose(stack[k], powers.power(t), atol=1e-12)


def test_matrix_power_preserves_kind():
    u = random_unitary(4)
    assert isinstance(matrix_power(u, 3), np.ndarray)
    g = matrix_power(UnitaryGate(u), 3)
    assert isinstance(g, UnitaryGate)
    assert_allclose(g.matrix, np.linalg.matrix_power(u, 3), atol=1e-11)


def test_eigenvalues_unitary_on_circle():
    u = random_unitary(8)
    mu = eigenvalues_unitary(u)
    assert_allclose(np.abs(mu), 1.0, atol=1e-10)
    assert_allclose(np.sort(np.angle(mu)),
                    np.sort(np.angle(np.linalg.eigvals(u))), atol=1e-8)
