"""Billiard dynamics of two-qubit gate content in the canonical chamber.

The nonlocal content of a two-qubit gate is a triple alpha = (a1, a2, a3)
with pi/4 >= a1 >= a2 >= a3 >= 0 (the chamber), defined up to the
identification (a1, a2, -a3) ~ (a1, a2, a3).  Iterating a gate moves its
content along straight lines folded back into the chamber by a triangle
wave, like a billiard trajectory.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .gates import cartan_gate, cartan_matrix, fidelity
from .linalg import UnitaryGate, gate_matrix, unitarity_defect

#: components below this threshold count as zero (chamber boundary)
ZERO_TOL = 1e-9

QUARTER_PI = np.pi / 4

# Bell-like basis in which every cartan_gate is diagonal and every product
# of single-qubit unitaries is real orthogonal (up to a phase).  Columns:
# (|00>+|11>)/sqrt2, i(|01>+|10>)/sqrt2, (|01>-|10>)/sqrt2, i(|00>-|11>)/sqrt2
MAGIC = np.array(
    [
        [1, 0, 0, 1j],
        [0, 1j, 1, 0],
        [0, 1j, -1, 0],
        [1, 0, 0, -1j],
    ],
    dtype=complex,
) / np.sqrt(2)

# eigenvalues of (sigma_k (x) sigma_k) on the four MAGIC columns, k = 1, 2, 3
_MAGIC_SIGNS = np.array(
    [
        [+1, +1, -1, -1],
        [-1, +1, -1, +1],
        [+1, -1, -1, +1],
    ],
    dtype=float,
)


def fold(x):
    """Triangle-wave fold of a phase onto [0, pi/4].

    f(x) = (pi/2) |2x/pi - floor(2x/pi + 1/2)|.  Even, pi/2-periodic, and
    exact at 0 (zero maps to zero), so chamber boundaries are preserved.
    """
    y = np.asarray(x, dtype=float) * (2.0 / np.pi)
    out = (np.pi / 2.0) * np.abs(y - np.floor(y + 0.5))
    if np.isscalar(x):
        return float(out)
    return out


def descending(x) -> np.ndarray:
    """Sort the last axis in descending order."""
    return np.sort(np.asarray(x, dtype=float), axis=-1)[..., ::-1]


def canonical_content(alpha) -> np.ndarray:
    """Map any real triple to its chamber representative: fold, then sort.

    The fold absorbs the pi/2 translations, reflections and the sign
    identification; the sort absorbs component permutations.
    """
    a = np.asarray(alpha, dtype=float)
    if a.shape[-1] != 3:
        raise ValueError(f"content must have three components, got shape {a.shape}")
    return descending(fold(a))


def is_canonical(alpha, tol: float = 1e-12) -> bool:
    """True if alpha is already its own chamber representative."""
    a = np.asarray(alpha, dtype=float)
    return a.shape == (3,) and bool(np.all(np.abs(canonical_content(a) - a) <= tol))


def _require_canonical(alpha) -> np.ndarray:
    a = np.asarray(alpha, dtype=float)
    if not is_canonical(a):
        raise ValueError(
            f"content {a!r} is not canonical; use canonical_content() first"
        )
    return a


class ChamberClass(enum.Enum):
    """Chamber stratum by the number m of nonzero content components."""

    I = 1
    II = 2
    III = 3

    @property
    def m(self) -> int:
        return self.value


def chamber_class(alpha, zero_tol: float = ZERO_TOL) -> ChamberClass:
    """Stratum of a canonical content triple.

    An all-zero triple (a local gate) is grouped with class I: every
    entropy formula degenerates correctly there.
    """
    a = _require_canonical(alpha)
    m = int(np.sum(a > zero_tol))
    return ChamberClass(max(m, 1))


def trajectory_content(alpha0, t) -> np.ndarray:
    """Content of the t-th power of a gate with canonical content alpha0.

    Each component moves linearly and is folded back by the triangle wave;
    the result is re-sorted into the chamber.  t may be a scalar (returns
    shape (3,)) or an array (returns shape t.shape + (3,)).
    """
    a0 = _require_canonical(alpha0)
    t = np.asarray(t, dtype=float)
    return canonical_content(np.multiply.outer(t, a0))


def bell_phases(alpha) -> np.ndarray:
    """Diagonal phases of cartan_gate(alpha) in the MAGIC basis."""
    a = np.asarray(alpha, dtype=float)
    return a @ _MAGIC_SIGNS


def local_invariants(u) -> tuple[complex, complex]:
    """The pair of local invariants of a two-qubit gate.

    With m = (Q^dag U Q)^T (Q^dag U Q) in the MAGIC basis Q, the invariants
    are tr(m)^2 / (16 det U) and (tr(m)^2 - tr(m^2)) / (4 det U); they are
    unchanged by single-qubit factors and by global phase.
    """
    m, n = gate_matrix(u)
    if n != 2:
        raise ValueError("local invariants are defined for two-qubit gates")
    mm = MAGIC.conj().T @ m @ MAGIC
    mq = mm.T @ mm
    det = np.linalg.det(m)
    tr = np.trace(mq)
    tr2 = np.trace(mq @ mq)
    return complex(tr**2 / (16 * det)), complex((tr**2 - tr2) / (4 * det))


def _invariants_from_phases(mu: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Local invariants from the eigenvalues of m (det-normalized input)."""
    s = mu.sum(axis=-1)
    g1 = s**2 / 16.0
    g2 = (s**2 - (mu**2).sum(axis=-1)) / 4.0
    return g1, g2


def content_batch(us: np.ndarray, atol: float = 1e-8) -> np.ndarray:
    """Canonical content for a stack of two-qubit gates, shape (n, 4, 4).

    Algorithm: normalize the determinant, transform to the MAGIC basis,
    form m = M^T M, and read off the eigenphases {2 phi_k}.  The content
    components are pairwise half-sums of three of the four half-phases.
    Branch choices (each half-phase is defined mod pi) and the assignment
    of eigenvalues to Bell slots shift the half-sums by multiples of pi/2
    or permute/negate them, all of which the chamber fold absorbs, so the
    finite candidate set reduces to the four leave-one-out triples.  Each
    candidate is scored by the distance of its local invariants to those
    of the input (conjugation allowed: the chamber identifies conjugate
    pairs) and the best is kept; ties go to the lexicographically largest
    canonical triple.
    """
    us = np.asarray(us, dtype=complex)
    if us.ndim == 2:
        us = us[None]
    if us.shape[-2:] != (4, 4):
        raise ValueError(f"expected two-qubit gates of shape (n, 4, 4), got {us.shape}")

    dets = np.linalg.det(us)
    ms = np.einsum("ij,njk,kl->nil", MAGIC.conj().T, us, MAGIC)
    mq = np.transpose(ms, (0, 2, 1)) @ ms
    mu = np.linalg.eigvals(mq)
    # divide out the global phase so the four true phases sum to 0 mod 2pi
    mu = mu * np.exp(-0.5j * np.angle(dets))[:, None]
    g1_u, g2_u = _invariants_from_phases(mu)

    psi = np.angle(mu) / 2.0  # each defined mod pi

    n = us.shape[0]
    cand = np.empty((n, 4, 3))
    for k in range(4):
        tri = np.delete(psi, k, axis=1)
        half_sums = np.stack(
            [
                (tri[:, 0] + tri[:, 1]) / 2.0,
                (tri[:, 0] + tri[:, 2]) / 2.0,
                (tri[:, 1] + tri[:, 2]) / 2.0,
            ],
            axis=1,
        )
        cand[:, k] = canonical_content(half_sums)

    phases = np.einsum("nkc,cb->nkb", cand, _MAGIC_SIGNS)
    mu_c = np.exp(2j * phases)
    g1_c, g2_c = _invariants_from_phases(mu_c)
    d_plain = (
        np.abs(g1_c - g1_u[:, None]) ** 2 + np.abs(g2_c - g2_u[:, None]) ** 2
    )
    d_conj = (
        np.abs(g1_c - np.conj(g1_u)[:, None]) ** 2
        + np.abs(g2_c - np.conj(g2_u)[:, None]) ** 2
    )
    score = np.minimum(d_plain, d_conj)

    out = np.empty((n, 3))
    order = np.arange(4)
    for i in range(n):
        eligible = np.flatnonzero(score[i] <= score[i].min() + 1e-12)
        if eligible.size == 1:
            out[i] = cand[i, eligible[0]]
        else:
            rows = cand[i, eligible]
            pick = max(range(rows.shape[0]), key=lambda j: tuple(rows[j]))
            out[i] = rows[pick]
        if score[i, order].min() > atol:
            raise ValueError(
                "content extraction failed to reconstruct the gate's local "
                f"invariants (residual {score[i].min():.3e}); input may not "
                "be unitary"
            )
    return out


def extract_content(u, atol: float = 1e-10) -> np.ndarray:
    """Canonical content triple of a two-qubit gate.

    Inverse of cartan_gate up to single-qubit factors, global phase, and
    the chamber identification.  Raises ValueError for non-unitary input
    or gates that are not 4x4.
    """
    m, n = gate_matrix(u)
    if n != 2:
        raise ValueError("content extraction is defined for two-qubit gates")
    if unitarity_defect(m) > max(atol, 1e-8):
        raise ValueError("input is not unitary within tolerance")
    return content_batch(m[None])[0]


@dataclass(frozen=True)
class Trajectory:
    """Sampled orbit of one gate under iteration.

    ``points[i]`` is the canonical content at ``times[i]``; ``shannon``
    and ``linear`` are the matching operator Schmidt entropies.
    """

    alpha0: np.ndarray
    times: np.ndarray
    points: np.ndarray
    shannon: np.ndarray
    linear: np.ndarray

    def __len__(self) -> int:
        return self.times.shape[0]


def cartan_trajectory(alpha0, steps: int | None = None, times=None) -> Trajectory:
    """Orbit of cartan_gate(alpha0): integer steps 1..T, or any time grid.

    Content follows the folded straight-line law and the entropies are
    evaluated in closed form, so arbitrarily long orbits cost O(T).
    """
    a0 = _require_canonical(alpha0)
    if (steps is None) == (times is None):
        raise ValueError("give exactly one of steps or times")
    if times is None:
        if steps < 0:
            raise ValueError("steps must be nonnegative")
        ts = np.arange(1, steps + 1, dtype=float)
    else:
        ts = np.asarray(times, dtype=float).ravel()
    from .schmidt import analytic_entropies

    pts = trajectory_content(a0, ts)
    s, sl = analytic_entropies(a0, ts)
    return Trajectory(alpha0=a0, times=ts, points=pts, shannon=s, linear=sl)


def interlaced_trajectory(v, y_loc, steps: int, loc_tol: float = 1e-9) -> Trajectory:
    """Orbit of (v . y_loc)^t where y_loc must be a product of single-qubit
    gates (checked through its operator Schmidt rank).

    Interlacing a local gate leaves the t = 1 content unchanged but opens
    the higher chamber strata from t = 2 on.
    """
    from .linalg import UnitaryPowers, matmul
    from .schmidt import schmidt_vector, shannon_entropy, linear_entropy

    mv, nv = gate_matrix(v)
    my, ny = gate_matrix(y_loc)
    if nv != 2 or ny != 2:
        raise ValueError("interlacing is defined for two-qubit gates")
    lam = schmidt_vector(my)
    if lam[1] > loc_tol:
        raise ValueError(
            f"y_loc is not a local product (second Schmidt coefficient {lam[1]:.3e})"
        )
    if steps < 1:
        raise ValueError("steps must be at least 1")
    u = matmul(mv, my)
    ts = np.arange(1, steps + 1, dtype=float)
    powers = UnitaryPowers(u).power_stack(ts)
    pts = content_batch(powers)
    lams = np.stack([schmidt_vector(p) for p in powers])
    s = np.array([shannon_entropy(l) for l in lams])
    sl = np.array([linear_entropy(l) for l in lams])
    return Trajectory(alpha0=pts[0], times=ts, points=pts, shannon=s, linear=sl)


class SearchBudgetError(RuntimeError):
    """A randomized search exhausted its attempt budget."""


def _is_generic_fraction(q: float, depth: int = 8, tol: float = 1e-12) -> bool:
    """Reject dyadic rationals: q * 2^k within tol of an integer, k <= depth."""
    for k in range(depth + 1):
        x = q * (1 << k)
        if abs(x - round(x)) <= tol:
            return False
    return True


def approximate_gate(
    target,
    min_fidelity: float,
    rng: np.random.Generator,
    chamber: int | None = None,
    max_tries: int = 64,
) -> tuple[np.ndarray, float]:
    """Generic canonical content near a target gate's content.

    Returns (alpha, achieved) with fidelity(cartan_gate(alpha), canonical
    form of target) >= min_fidelity and every active component strictly
    inside (0, pi/4), away from low-order dyadic fractions of pi/4 (such
    orbits are periodic instead of filling).

    ``chamber`` = m restricts the perturbation to the first m components
    (the rest must be zero in the target and stay zero); by default all
    three components are made generic.  min_fidelity >= 1 degenerates to
    the target's own content.  Raises SearchBudgetError if no direction
    within the budget yields a generic point above the threshold.
    """
    a0 = extract_content(target)
    if min_fidelity >= 1.0:
        return a0, 1.0
    m_active = 3 if chamber is None else int(chamber)
    if m_active not in (1, 2, 3):
        raise ValueError(f"chamber must be 1, 2, or 3, got {chamber!r}")
    if np.any(a0[m_active:] > ZERO_TOL):
        raise ValueError(
            f"target content {a0!r} has more than {m_active} nonzero components"
        )
    v0 = cartan_matrix(a0)
    margin = 1e-6
    delta_max = QUARTER_PI / 2.0

    for _ in range(max_tries):
        direction = np.zeros(3)
        d = rng.uniform(0.25, 1.0, size=m_active) * rng.choice(
            [-1.0, 1.0], size=m_active
        )
        # push boundary components strictly inward
        d = np.where(a0[:m_active] <= ZERO_TOL, np.abs(d), d)
        d = np.where(a0[:m_active] >= QUARTER_PI - ZERO_TOL, -np.abs(d), d)
        direction[:m_active] = d

        def candidate(delta: float) -> np.ndarray:
            a = np.clip(a0 + delta * direction, margin, QUARTER_PI - margin)
            a[m_active:] = 0.0
            return canonical_content(a)

        def fid(delta: float) -> float:
            return fidelity(cartan_matrix(candidate(delta)), v0)

        lo, hi = 0.0, delta_max
        if fid(hi) < min_fidelity:
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if fid(mid) >= min_fidelity:
                    lo = mid
                else:
                    hi = mid
            delta = lo * 0.95
        else:
            delta = hi
        alpha = candidate(delta)
        achieved = fidelity(cartan_matrix(alpha), v0)
        active = alpha[:m_active]
        ok = (
            achieved >= min_fidelity
            and np.all(active > ZERO_TOL)
            and np.all(active < QUARTER_PI - ZERO_TOL)
            and all(_is_generic_fraction(a / QUARTER_PI) for a in active)
            and np.all(np.abs(np.subtract.outer(active, active))[
                np.triu_indices(m_active, 1)
            ] > 1e-7)
        )
        if ok:
            return alpha, float(achieved)
    raise SearchBudgetError(
        f"no generic content with fidelity >= {min_fidelity} found "
        f"in {max_tries} attempts"
    )
