"""Estimators and reference laws for entropy statistics.

Histograms and moment summaries are mergeable value types so that Monte
Carlo work can be chunked (and parallelized) with a deterministic,
order-independent reduction.  The reference side collects the closed-form
laws the experiments are compared against: the arcsine density of linear
entropy, the Marchenko-Pastur density of rescaled Schmidt spectra, and
the exact or quadrature chamber averages.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .ensembles import _gen
from .schmidt import cartan_schmidt_vector, _xlogx
from .weyl import QUARTER_PI, SearchBudgetError, ZERO_TOL, canonical_content


# ---------------------------------------------------------------------------
# mergeable estimators

@dataclass(frozen=True)
class Histogram:
    """Fixed-bin histogram with explicit out-of-range bookkeeping."""

    edges: np.ndarray
    counts: np.ndarray
    underflow: int = 0
    overflow: int = 0

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + self.underflow + self.overflow

    @property
    def in_range(self) -> int:
        return int(self.counts.sum())

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def density(self) -> np.ndarray:
        """Per-bin density, normalized so sum(density * width) = 1."""
        widths = np.diff(self.edges)
        n = max(self.in_range, 1)
        return self.counts / (n * widths)

    def add(self, values) -> "Histogram":
        """New histogram with ``values`` accumulated on the same bins."""
        v = np.asarray(values, dtype=float).ravel()
        counts, _ = np.histogram(v, bins=self.edges)
        return Histogram(
            edges=self.edges,
            counts=self.counts + counts,
            underflow=self.underflow + int(np.sum(v < self.edges[0])),
            overflow=self.overflow + int(np.sum(v > self.edges[-1])),
        )

    def merge(self, other: "Histogram") -> "Histogram":
        """Combine two histograms accumulated on identical bins."""
        if self.edges.shape != other.edges.shape or not np.array_equal(
            self.edges, other.edges
        ):
            raise ValueError("histograms have different bin edges")
        return Histogram(
            edges=self.edges,
            counts=self.counts + other.counts,
            underflow=self.underflow + other.underflow,
            overflow=self.overflow + other.overflow,
        )


def make_histogram(lo: float, hi: float, bins: int) -> Histogram:
    """Empty histogram with ``bins`` equal cells on [lo, hi]."""
    if not (hi > lo) or bins < 1:
        raise ValueError("need hi > lo and at least one bin")
    return Histogram(
        edges=np.linspace(lo, hi, bins + 1),
        counts=np.zeros(bins, dtype=np.int64),
    )


@dataclass(frozen=True)
class MomentSummary:
    """Streaming first/second/fourth raw moments with exact merging."""

    n: int
    mean: float
    second: float
    fourth: float

    @staticmethod
    def from_values(values) -> "MomentSummary":
        v = np.asarray(values, dtype=float).ravel()
        if v.size == 0:
            return MomentSummary(0, 0.0, 0.0, 0.0)
        return MomentSummary(
            n=int(v.size),
            mean=float(v.mean()),
            second=float(np.mean(v**2)),
            fourth=float(np.mean(v**4)),
        )

    def merge(self, other: "MomentSummary") -> "MomentSummary":
        n = self.n + other.n
        if n == 0:
            return MomentSummary(0, 0.0, 0.0, 0.0)
        w1, w2 = self.n / n, other.n / n
        return MomentSummary(
            n=n,
            mean=w1 * self.mean + w2 * other.mean,
            second=w1 * self.second + w2 * other.second,
            fourth=w1 * self.fourth + w2 * other.fourth,
        )

    @property
    def variance(self) -> float:
        return max(self.second - self.mean**2, 0.0)

    @property
    def stderr_mean(self) -> float:
        return math.sqrt(self.variance / self.n) if self.n else math.inf

    @property
    def stderr_second(self) -> float:
        var2 = max(self.fourth - self.second**2, 0.0)
        return math.sqrt(var2 / self.n) if self.n else math.inf


def blocked_moments(values, n_blocks: int = 100) -> dict:
    """Mean and second moment with jackknife-over-blocks error bars.

    Samples along one orbit are not independent, so the naive stderr is
    biased; leave-one-block-out over ``n_blocks`` contiguous blocks gives
    honest error bars for both moments.
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size < n_blocks:
        n_blocks = max(1, v.size)
    blocks = np.array_split(v, n_blocks)
    ns = np.array([b.size for b in blocks], dtype=float)
    s1 = np.array([b.sum() for b in blocks])
    s2 = np.array([(b**2).sum() for b in blocks])
    n_tot, s1_tot, s2_tot = ns.sum(), s1.sum(), s2.sum()

    def jack(stot, sb):
        theta = (stot - sb) / (n_tot - ns)
        b = len(theta)
        if b < 2:
            return float(stot / n_tot), math.inf
        se = math.sqrt((b - 1) / b * np.sum((theta - theta.mean()) ** 2))
        return float(stot / n_tot), se

    mean, mean_se = jack(s1_tot, s1)
    second, second_se = jack(s2_tot, s2)
    return {"n": int(n_tot), "mean": mean, "mean_se": mean_se,
            "second": second, "second_se": second_se}


# ---------------------------------------------------------------------------
# distribution distances

def ks_distance(samples, cdf) -> float:
    """Kolmogorov-Smirnov distance between samples and a reference CDF."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise ValueError("need at least one sample")
    f = np.asarray(cdf(x), dtype=float)
    hi = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    return float(max(np.max(hi - f), np.max(f - lo)))


def ks_two_sample(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov distance."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("need at least one sample on each side")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


# ---------------------------------------------------------------------------
# reference laws

def arcsine_pdf(s) -> np.ndarray:
    """Arcsine density of linear entropy on its support (0, 1/2)."""
    s = np.asarray(s, dtype=float)
    inside = (s > 0.0) & (s < 0.5)
    safe = np.where(inside, s, 0.25)
    return np.where(inside, 1.0 / (np.pi * np.sqrt(safe * (0.5 - safe))), 0.0)


def arcsine_cdf(s) -> np.ndarray:
    """CDF of the arcsine law on (0, 1/2)."""
    s = np.asarray(s, dtype=float)
    clipped = np.clip(s, 0.0, 0.5)
    out = (2.0 / np.pi) * np.arcsin(np.sqrt(2.0 * clipped))
    return out if out.ndim else float(out)


def mp_pdf(x) -> np.ndarray:
    """Marchenko-Pastur density sqrt(1 - x/4) / (pi sqrt(x)) on (0, 4]."""
    x = np.asarray(x, dtype=float)
    inside = (x > 0.0) & (x <= 4.0)
    safe = np.where(inside, x, 1.0)
    return np.where(inside, np.sqrt(1.0 - safe / 4.0) / (np.pi * np.sqrt(safe)), 0.0)


def mp_cdf(x) -> np.ndarray:
    """CDF of the Marchenko-Pastur law on (0, 4]."""
    x = np.asarray(x, dtype=float)
    clipped = np.clip(x, 0.0, 4.0)
    theta = np.arcsin(np.sqrt(clipped) / 2.0)
    out = (2.0 / np.pi) * theta + np.sqrt(clipped * (4.0 - clipped)) / (2.0 * np.pi)
    return out if out.ndim else float(out)


def cue_means(subsystem_dim: int) -> tuple[float, float]:
    """(Shannon, linear) entropy references for Haar gates on N x N levels.

    The Shannon value ln(N^2) - 1/2 is the large-N limit; the linear value
    (N^2 - 1)/(N^2 + 1) is exact at every N.
    """
    n2 = subsystem_dim**2
    return math.log(n2) - 0.5, (n2 - 1) / (n2 + 1)


def cpe_means(subsystem_dim: int) -> tuple[float, float]:
    """(Shannon, linear) entropy means for diagonal-phase gates.

    S   = 1 - N + ln N + (N - 1)^2 ln(N / (N - 1))
    S_L = (N - 1)^2 / N^2

    The linear value is exact at every N; the Shannon expression matches
    the exact N = 2 value 2 ln 2 - 1 and tends to ln N - 1/2 for large N
    (only N of the N^2 Schmidt weights are nonzero for a diagonal gate).
    """
    n = subsystem_dim
    if n < 2:
        raise ValueError("subsystem_dim must be at least 2")
    s = 1.0 - n + math.log(n) + (n - 1) ** 2 * math.log(n / (n - 1))
    return s, (n - 1) ** 2 / n**2


# ---------------------------------------------------------------------------
# chamber averages

def content_entropies(alphas) -> tuple[np.ndarray, np.ndarray]:
    """(Shannon, linear) entropies of cartan gates for stacked content."""
    lam = cartan_schmidt_vector(alphas)
    s = -_xlogx(lam).sum(axis=-1)
    sl = 1.0 - (lam**2).sum(axis=-1)
    return s, sl


def _gauss_grid(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return QUARTER_PI * (x + 1.0) / 2.0, w / 2.0  # nodes on [0, pi/4], sum w = 1


@lru_cache(maxsize=None)
def chamber_moments(chamber: int) -> dict:
    """First and second moments of both entropies, flat on one stratum.

    Linear-entropy moments are exact rationals.  Shannon moments: the
    one-component mean is 2 ln 2 - 1 exactly; the two-component stratum
    has a product Schmidt vector, so its Shannon entropy is a sum of two
    independent one-component entropies; the rest is quadrature.
    """
    if chamber not in (1, 2, 3):
        raise ValueError("chamber must be 1, 2, or 3")
    sl = {1: 0.25, 2: 7.0 / 16.0, 3: 9.0 / 16.0}[chamber]
    sl2 = {1: 3.0 / 32.0, 2: 233.0 / 1024.0, 3: 351.0 / 1024.0}[chamber]
    if chamber == 1:
        def h(a):
            big = math.cos(a) ** 2
            return -(big * math.log(big) + (1 - big) * math.log(1 - big)) if 0 < big < 1 else 0.0
        s = 2.0 * math.log(2.0) - 1.0
        s2 = quad(lambda a: h(a) ** 2, 0.0, QUARTER_PI, epsabs=1e-13)[0] / QUARTER_PI
        kind = "exact"
    elif chamber == 2:
        base = chamber_moments(1)
        s = 2.0 * base["S"]
        s2 = 2.0 * base["S2"] + 2.0 * base["S"] ** 2
        kind = "exact"
    else:
        nodes, w = _gauss_grid(128)
        a1, a2, a3 = np.meshgrid(nodes, nodes, nodes, indexing="ij")
        alphas = np.stack([a1, a2, a3], axis=-1).reshape(-1, 3)
        sv, _ = content_entropies(alphas)
        sv = sv.reshape(128, 128, 128)
        weights = w[:, None, None] * w[None, :, None] * w[None, None, :]
        s = float(np.sum(weights * sv))
        s2 = float(np.sum(weights * sv**2))
        kind = "quadrature"
    return {"S": s, "S2": s2, "SL": sl, "SL2": sl2, "S_kind": kind}


def generic_alpha(chamber: int, stream, max_tries: int = 100) -> np.ndarray:
    """A generic canonical content triple on one stratum.

    Components are uniform draws kept away from the chamber walls, from
    each other, and from low-order dyadic fractions of pi/4 (those give
    periodic orbits instead of filling ones).
    """
    if chamber not in (1, 2, 3):
        raise ValueError("chamber must be 1, 2, or 3")
    g = _gen(stream)
    margin = 1e-3
    for _ in range(max_tries):
        a = np.zeros(3)
        a[:chamber] = np.sort(
            g.uniform(margin, QUARTER_PI - margin, size=chamber)
        )[::-1]
        q = a[:chamber] / QUARTER_PI
        dyadic = any(
            abs(qi * (1 << k) - round(qi * (1 << k))) <= 1e-12
            for qi in q
            for k in range(9)
        )
        gaps = np.diff(a[:chamber])
        if not dyadic and np.all(np.abs(gaps) > 1e-6):
            return canonical_content(a)
    raise SearchBudgetError(f"no generic content found in {max_tries} tries")


def time_average_entropy(alpha0, steps: int, n_blocks: int = 100) -> dict:
    """Moments of both entropies along one orbit, with jackknife errors.

    Returns {'S': blocked moments, 'SL': blocked moments, 'n': steps}.
    """
    from .schmidt import analytic_entropies

    if steps < 1:
        raise ValueError("steps must be positive")
    t = np.arange(1, steps + 1, dtype=float)
    s, sl = analytic_entropies(alpha0, t)
    return {"S": blocked_moments(s, n_blocks), "SL": blocked_moments(sl, n_blocks),
            "n": int(steps)}


def space_average_entropy(chamber: int, samples: int, stream) -> dict:
    """Monte Carlo moments of both entropies, flat on one stratum.

    Returns {'S': MomentSummary, 'SL': MomentSummary}.
    """
    from .ensembles import sample_gamma_stack

    if samples < 1:
        raise ValueError("samples must be positive")
    alphas = sample_gamma_stack(chamber, samples, stream)
    s, sl = content_entropies(alphas)
    return {"S": MomentSummary.from_values(s), "SL": MomentSummary.from_values(sl)}


def freeness_moment(a, b, *, normalized: bool = False) -> float:
    """Mixed moment |Tr(a b^dag)| of two equal-size matrices.

    With ``normalized=True`` the value is divided by the matrix dimension
    (the convention for unitary arguments; trace-normalized positive
    arguments are compared raw).
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.ndim != 2:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    val = abs(np.sum(a * np.conjugate(b)))
    return float(val / a.shape[0]) if normalized else float(val)
