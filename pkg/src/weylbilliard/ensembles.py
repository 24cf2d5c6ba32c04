"""Seeded random ensembles: Ginibre, circular (Haar), diagonal-phase, and
Wishart matrices, plus flat sampling of the gate-content chamber.

All sampling goes through :class:`RandomStream`, a thin wrapper over
numpy's SeedSequence/PCG64 machinery that supports deterministic,
order-independent splitting into indexed substreams.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .linalg import UnitaryGate
from .weyl import QUARTER_PI


class RandomStream:
    """Deterministic random source with indexed substream splitting.

    Same seed and same call sequence give identical draws on every
    platform; substreams derived from distinct index paths are
    statistically independent and do not depend on the order in which
    they are created or consumed.
    """

    def __init__(self, seed: int, _path: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.path = tuple(_path)
        self._sequence = np.random.SeedSequence(self.seed, spawn_key=self.path)
        self.generator = np.random.Generator(np.random.PCG64(self._sequence))

    def substream(self, index: int) -> "RandomStream":
        """Independent stream identified by (seed, path + (index,))."""
        if index < 0:
            raise ValueError("substream index must be nonnegative")
        return RandomStream(self.seed, self.path + (int(index),))

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, path={self.path})"


def _gen(stream) -> np.random.Generator:
    if isinstance(stream, RandomStream):
        return stream.generator
    if isinstance(stream, np.random.Generator):
        return stream
    raise TypeError(f"expected RandomStream or numpy Generator, got {type(stream)}")


class EnsembleKind(enum.Enum):
    """Gate ensembles the toolkit can draw from or iterate."""

    CUE = "cue"
    CPE = "cpe"
    GAMMA = "gamma"


@dataclass(frozen=True)
class EnsembleSpec:
    """What to sample: which ensemble, at which subsystem size, how often."""

    kind: EnsembleKind
    subsystem_dim: int
    samples: int
    seed: int
    chamber: int | None = field(default=None)

    def __post_init__(self):
        if self.subsystem_dim < 2:
            raise ValueError("subsystem_dim must be at least 2")
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if self.kind is EnsembleKind.GAMMA:
            if self.subsystem_dim != 2:
                raise ValueError("the content chamber is a two-qubit object")
            if self.chamber not in (1, 2, 3):
                raise ValueError("gamma ensembles need chamber in {1, 2, 3}")


def ginibre_stack(dim: int, n: int, stream) -> np.ndarray:
    """n complex Ginibre matrices, entries ~ CN(0, 1), shape (n, dim, dim)."""
    g = _gen(stream)
    re = g.standard_normal((n, dim, dim))
    im = g.standard_normal((n, dim, dim))
    return (re + 1j * im) / np.sqrt(2.0)


def ginibre(dim: int, stream) -> np.ndarray:
    """One complex Ginibre matrix with iid CN(0, 1) entries."""
    return ginibre_stack(dim, 1, stream)[0]


def haar_stack(dim: int, n: int, stream) -> np.ndarray:
    """n Haar-distributed unitaries, shape (n, dim, dim).

    QR of a Ginibre matrix alone is *not* Haar: the QR phase convention
    biases the eigenvalue distribution.  Multiplying each column by the
    phase of the matching diagonal entry of R removes the bias.
    """
    a = ginibre_stack(dim, n, stream)
    q, r = np.linalg.qr(a)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[:, None, :]


def haar_unitary(dim: int, stream) -> np.ndarray:
    """One Haar (circular unitary ensemble) matrix of any dimension."""
    return haar_stack(dim, 1, stream)[0]


def cpe_phases(dim: int, n: int, stream) -> np.ndarray:
    """n rows of dim iid phases uniform on [0, 2 pi), shape (n, dim)."""
    return _gen(stream).uniform(0.0, 2.0 * np.pi, size=(n, dim))


def cpe_diagonal(dim: int, stream) -> UnitaryGate:
    """One diagonal gate with iid uniform eigenphases (Poissonian spectrum)."""
    theta = cpe_phases(dim, 1, stream)[0]
    return UnitaryGate(np.diag(np.exp(1j * theta)))


def wishart_stack(dim: int, n: int, stream) -> np.ndarray:
    """n trace-normalized Wishart matrices W = X X^dag / Tr(X X^dag)."""
    x = ginibre_stack(dim, n, stream)
    w = x @ np.conjugate(np.transpose(x, (0, 2, 1)))
    tr = np.trace(w, axis1=-2, axis2=-1).real
    return w / tr[:, None, None]


def wishart(dim: int, stream) -> np.ndarray:
    """One trace-normalized complex Wishart matrix (unit trace, positive)."""
    return wishart_stack(dim, 1, stream)[0]


def local_stack(n: int, stream) -> np.ndarray:
    """n products u (x) w of independent Haar single-qubit gates, (n, 4, 4)."""
    u = haar_stack(2, n, stream)
    w = haar_stack(2, n, stream)
    return np.einsum("nij,nkl->nikjl", u, w).reshape(n, 4, 4)


def random_local(stream) -> UnitaryGate:
    """One two-qubit gate that is a product of single-qubit Haar gates."""
    return UnitaryGate(local_stack(1, stream)[0], 2)


def sample_gamma_stack(chamber: int, n: int, stream) -> np.ndarray:
    """n content triples drawn flat on the chamber stratum with m components.

    The flat measure on the ordered stratum is the sorted image of m iid
    uniforms on [0, pi/4]; the remaining components are exact zeros.
    """
    if chamber not in (1, 2, 3):
        raise ValueError("chamber must be 1, 2, or 3")
    out = np.zeros((n, 3))
    draws = _gen(stream).uniform(0.0, QUARTER_PI, size=(n, chamber))
    out[:, :chamber] = np.sort(draws, axis=1)[:, ::-1]
    return out


def sample_gamma(chamber: int, stream) -> np.ndarray:
    """One canonical content triple, flat on the m-component stratum."""
    return sample_gamma_stack(chamber, 1, stream)[0]
