"""Dense complex matrix primitives and the bipartite unitary gate type.

Everything here works on plain ``numpy`` arrays of complex128.  The only
structured type is :class:`UnitaryGate`, which pins the bipartite split
``d = N * N`` to the matrix it wraps and validates unitarity once at
construction time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import schur

#: default absolute tolerance for unitarity checks at construction time
UNITARY_ATOL = 1e-10


def as_complex_matrix(a) -> np.ndarray:
    """Coerce input to a 2D complex128 array, rejecting non-matrix shapes."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2D matrix, got shape {m.shape}")
    return m


def tensor(a, b) -> np.ndarray:
    """Kronecker product ``a (x) b``."""
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def matmul(a, b) -> np.ndarray:
    """Matrix product with an explicit conformability check."""
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def frobenius_norm(a) -> float:
    """Frobenius norm ``sqrt(sum |a_ij|^2)``."""
    return float(np.linalg.norm(as_complex_matrix(a)))


def trace_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``Tr(a^dag b)``."""
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.sum(np.conjugate(a) * b))


def singular_values(a) -> np.ndarray:
    """Singular values of ``a`` in descending order."""
    return np.linalg.svd(as_complex_matrix(a), compute_uv=False)


def unitarity_defect(a) -> float:
    """Max-norm deviation of ``a^dag a`` from the identity."""
    a = as_complex_matrix(a)
    if a.shape[0] != a.shape[1]:
        return math.inf
    return float(np.abs(a.conj().T @ a - np.eye(a.shape[0])).max())


def is_unitary(a, atol: float = UNITARY_ATOL) -> bool:
    """True if ``a`` is square and unitary within ``atol`` (max norm)."""
    return unitarity_defect(a) <= atol


@dataclass(frozen=True, eq=False)
class UnitaryGate:
    """A d x d unitary acting on two N-dimensional subsystems, d = N^2.

    The matrix is validated (square, d a perfect square, unitary within
    ``atol``) and stored read-only; instances behave as immutable values.
    """

    matrix: np.ndarray
    subsystem_dim: int = 0
    atol: float = field(default=UNITARY_ATOL, repr=False, compare=False)

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"gate matrix must be square, got {m.shape}")
        d = m.shape[0]
        n = self.subsystem_dim
        if n == 0:
            n = math.isqrt(d)
            object.__setattr__(self, "subsystem_dim", n)
        if n * n != d:
            raise ValueError(
                f"dimension {d} is not the square of subsystem_dim {n}"
            )
        defect = unitarity_defect(m)
        if defect > self.atol:
            raise ValueError(
                f"matrix is not unitary within {self.atol:g} "
                f"(defect {defect:.3e})"
            )
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        """Total dimension d = subsystem_dim**2."""
        return self.matrix.shape[0]

    def __matmul__(self, other: "UnitaryGate") -> "UnitaryGate":
        if not isinstance(other, UnitaryGate):
            return NotImplemented
        return UnitaryGate(matmul(self.matrix, other.matrix), self.subsystem_dim)

    def dagger(self) -> "UnitaryGate":
        return UnitaryGate(self.matrix.conj().T, self.subsystem_dim)


def gate_matrix(u) -> tuple[np.ndarray, int]:
    """Return ``(matrix, subsystem_dim)`` for a UnitaryGate or a raw array."""
    if isinstance(u, UnitaryGate):
        return u.matrix, u.subsystem_dim
    m = as_complex_matrix(u)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"gate matrix must be square, got {m.shape}")
    n = math.isqrt(m.shape[0])
    if n * n != m.shape[0]:
        raise ValueError(f"dimension {m.shape[0]} is not a perfect square")
    return m, n


def _square_matrix(u) -> tuple[np.ndarray, int]:
    """Like gate_matrix, but for operations that need no bipartite split.

    The second element is the subsystem dimension when one exists, else 0.
    """
    if isinstance(u, UnitaryGate):
        return u.matrix, u.subsystem_dim
    m = as_complex_matrix(u)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got {m.shape}")
    n = math.isqrt(m.shape[0])
    return m, n if n * n == m.shape[0] else 0


class UnitaryPowers:
    """Integer (and real) powers of one unitary from a single factorization.

    A complex Schur decomposition ``U = Z T Z^dag`` of a unitary has
    diagonal T, so ``U^t = Z diag(e^{i t phi}) Z^dag`` follows from phase
    arithmetic alone.  This keeps ``U^t`` unitary to roundoff for t up to
    at least 1e5, unlike repeated multiplication.
    """

    def __init__(self, u, atol: float = UNITARY_ATOL):
        m, self.subsystem_dim = _square_matrix(u)
        defect = unitarity_defect(m)
        if defect > atol:
            raise ValueError(
                f"matrix is not unitary within {atol:g} (defect {defect:.3e})"
            )
        t, z = schur(m, output="complex")
        off = float(np.abs(np.tril(t, -1)).max()) if t.shape[0] > 1 else 0.0
        if off > 1e3 * atol:
            raise ValueError(f"Schur form not diagonal (off-diagonal {off:.3e})")
        self.phases = np.angle(np.diagonal(t))
        self.basis = np.ascontiguousarray(z)

    def power(self, t) -> np.ndarray:
        """Matrix for ``U^t``; t may be any real number (t >= 0 typical)."""
        d = np.exp(1j * float(t) * self.phases)
        return (self.basis * d) @ self.basis.conj().T

    def power_stack(self, ts) -> np.ndarray:
        """Stacked powers, shape ``(len(ts), d, d)``."""
        ts = np.asarray(ts, dtype=float)
        d = np.exp(1j * np.multiply.outer(ts, self.phases))
        return np.einsum("ij,tj,kj->tik", self.basis, d, self.basis.conj())


def matrix_power(u, t: int):
    """``u**t`` for a nonnegative integer t, via one-time diagonalization.

    Returns the same kind of object it is given (UnitaryGate in, UnitaryGate
    out; array in, array out).
    """
    if t != int(t) or t < 0:
        raise ValueError(f"power must be a nonnegative integer, got {t!r}")
    t = int(t)
    m, n = _square_matrix(u)
    if t == 0:
        out = np.eye(m.shape[0], dtype=complex)
    elif t == 1:
        out = m.copy()
    else:
        out = UnitaryPowers(u).power(t)
    if isinstance(u, UnitaryGate):
        return UnitaryGate(out, n, atol=1e-8)
    return out


def eigenvalues_unitary(u, atol: float = 1e-8) -> np.ndarray:
    """Eigenvalues of a unitary matrix (unit modulus, via the Schur form).

    Raises ValueError if the input is not unitary within ``atol``.
    """
    m, _ = _square_matrix(u)
    if unitarity_defect(m) > atol:
        raise ValueError("input is not unitary within tolerance")
    t, _ = schur(m, output="complex")
    return np.diagonal(t).copy()
