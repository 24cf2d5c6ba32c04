"""Experiment runners behind the command-line interface.

Each ``run_*`` function takes an :class:`ExperimentConfig` and returns a
:class:`Report`: a flat header, a column list, data rows, and a summary
dict.  Reports serialize to CSV (one ``# key=value`` header line, then
column names, then rows; summaries go to a ``.summary.json`` sidecar) or
to a single JSON document.  Given the same config, the emitted bytes are
identical run to run, except for the trailing ``duration_s`` header key.

Monte Carlo work is split into fixed-size chunks, one indexed substream
per chunk, and reduced in chunk order - so results do not depend on the
number of worker threads.
"""
from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .ensembles import (
    RandomStream,
    cpe_phases,
    haar_stack,
    local_stack,
    random_local,
    sample_gamma_stack,
    wishart_stack,
)
from .gates import cartan_matrix, named_gate
from .linalg import UnitaryPowers
from .schmidt import _xlogx, analytic_entropies, reshuffle, schmidt_vector_stack
from .stats import (
    Histogram,
    MomentSummary,
    arcsine_cdf,
    blocked_moments,
    chamber_moments,
    content_entropies,
    cpe_means,
    cue_means,
    generic_alpha,
    ks_distance,
    ks_two_sample,
    make_histogram,
    mp_cdf,
)
from .weyl import (
    approximate_gate,
    canonical_content,
    chamber_class,
    content_batch,
    is_canonical,
    trajectory_content,
)

COMMANDS = (
    "trajectory",
    "ensemble",
    "moments",
    "spectral",
    "freeness",
    "approximate",
    "interlace",
    "tables",
)

#: chunk sizes are fixed so that results are independent of --threads
CHUNK_GATES = 20_000
CHUNK_BIG = 50
CHUNK_STEPS = 512


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one command run depends on (all of it lands in the header)."""

    command: str
    seed: int = 0
    samples: int | None = None
    steps: int | None = None
    dim: int | None = None
    chamber: int | None = None
    alpha: tuple[float, float, float] | None = None
    bins: int = 100
    kind: str | None = None
    mode: str = "ensemble"
    modes: tuple[str, ...] = ("wishart", "haar", "trajectory")
    targets: tuple[str, ...] = ("cnot", "sqrt_cnot", "swap", "sqrt_swap")
    min_fidelity: float = 0.998
    dims: tuple[int, ...] = (4, 100)
    pairs: int | None = None
    grid: int | None = None
    threads: int = 1
    fmt: str = "csv"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.threads < 1:
            raise ValueError("threads must be positive")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.fmt!r}")
        if self.bins < 1:
            raise ValueError("bins must be positive")
        if self.dim is not None and self.dim < 2:
            raise ValueError("dim (subsystem dimension N) must be at least 2")


@dataclass
class Report:
    """One experiment's output: header, tabular data, and summary scalars."""

    command: str
    header: dict
    columns: list[str]
    rows: list[tuple]
    summary: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# serialization

def _fmt_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (tuple, list, np.ndarray)):
        return ",".join(_fmt_value(x) for x in v)
    return str(v)


def _json_ready(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.ndarray):
        return [_json_ready(x) for x in v.tolist()]
    if isinstance(v, (tuple, list)):
        return [_json_ready(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _json_ready(x) for k, x in v.items()}
    return v


def header_line(header: dict) -> str:
    return "# " + " ".join(f"{k}={_fmt_value(v)}" for k, v in header.items())


def write_report(report: Report, out: Path, fmt: str) -> list[Path]:
    """Write a report to ``out``; returns the paths written."""
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    written = [out]
    if fmt == "json":
        doc = {
            "header": _json_ready(report.header),
            "summary": _json_ready(report.summary),
            "columns": list(report.columns),
            "rows": [[_json_ready(v) for v in row] for row in report.rows],
        }
        out.write_text(json.dumps(doc, indent=1) + "\n")
        return written
    lines = [header_line(report.header), ",".join(report.columns)]
    for row in report.rows:
        lines.append(",".join(_fmt_value(v) for v in row))
    out.write_text("\n".join(lines) + "\n")
    if report.summary:
        side = out.with_suffix(".summary.json")
        side.write_text(
            json.dumps(
                {"header": _json_ready(report.header),
                 "summary": _json_ready(report.summary)},
                indent=1,
            )
            + "\n"
        )
        written.append(side)
    return written


# ---------------------------------------------------------------------------
# deterministic chunked map

def map_chunks(worker, total: int, chunk: int, stream: RandomStream, threads: int):
    """Run ``worker(substream, count, start)`` over fixed-size chunks.

    Partial results are returned in chunk order whatever the thread count,
    so any order-respecting reduction is deterministic.
    """
    tasks = []
    start = 0
    index = 0
    while start < total:
        c = min(chunk, total - start)
        tasks.append((index, start, c))
        index += 1
        start += c
    call = lambda t: worker(stream.substream(t[0]), t[2], t[1])
    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(call, tasks))
    return [call(t) for t in tasks]


def _merge_parts(parts):
    """Merge a list of dicts of Histogram / MomentSummary / list values."""
    out = dict(parts[0])
    for p in parts[1:]:
        for k, v in p.items():
            if isinstance(v, Histogram):
                out[k] = out[k].merge(v)
            elif isinstance(v, MomentSummary):
                out[k] = out[k].merge(v)
            elif isinstance(v, list):
                out[k] = out[k] + v
            else:
                raise TypeError(f"cannot merge partial of type {type(v)}")
    return out


# ---------------------------------------------------------------------------
# entropy sampling back ends

def _entropies_of_gates(us: np.ndarray, n_sub: int) -> tuple[np.ndarray, np.ndarray]:
    lam = schmidt_vector_stack(us, n_sub)
    return -_xlogx(lam).sum(axis=1), 1.0 - (lam**2).sum(axis=1)


def _entropies_of_phases(theta: np.ndarray, n_sub: int) -> tuple[np.ndarray, np.ndarray]:
    """Entropies of diagonal gates given eigenphase rows, shape (n, N*N).

    The reshuffle of a diagonal gate is supported on one dense N x N block
    with entries exp(i theta_{mn}), so only N Schmidt weights are nonzero
    and an N x N singular value problem suffices.
    """
    block = np.exp(1j * theta).reshape(-1, n_sub, n_sub)
    sv = np.linalg.svd(block, compute_uv=False)
    lam = (sv / n_sub) ** 2
    return -_xlogx(lam).sum(axis=1), 1.0 - (lam**2).sum(axis=1)


def _entropy_ranges(n_sub: int) -> tuple[tuple[float, float], tuple[float, float]]:
    return (0.0, float(np.log(n_sub**2)) + 0.05), (0.0, 1.0)


def ensemble_entropy_stats(
    kind: str,
    n_sub: int,
    samples: int,
    stream: RandomStream,
    threads: int = 1,
    bins: int = 100,
) -> dict:
    """Histograms and moments of (S, S_L) over an ensemble of gates."""
    (s_lo, s_hi), (l_lo, l_hi) = _entropy_ranges(n_sub)
    chunk = CHUNK_GATES if n_sub == 2 else CHUNK_BIG * 4

    def worker(sub, count, _start):
        if kind == "cue":
            s, sl = _entropies_of_gates(haar_stack(n_sub**2, count, sub), n_sub)
        elif kind == "cpe":
            s, sl = _entropies_of_phases(cpe_phases(n_sub**2, count, sub), n_sub)
        else:
            raise ValueError(f"unknown ensemble kind {kind!r}")
        return {
            "hist_S": make_histogram(s_lo, s_hi, bins).add(s),
            "hist_SL": make_histogram(l_lo, l_hi, bins).add(sl),
            "mom_S": MomentSummary.from_values(s),
            "mom_SL": MomentSummary.from_values(sl),
            "sl_values": [sl],
        }

    merged = _merge_parts(map_chunks(worker, samples, chunk, stream, threads))
    merged["sl_values"] = np.concatenate(merged["sl_values"])
    return merged


def trajectory_entropy_stats(
    kind: str,
    n_sub: int,
    steps: int,
    stream: RandomStream,
    threads: int = 1,
    bins: int = 100,
) -> dict:
    """Histograms and moments of (S, S_L) along one random gate's orbit."""
    (s_lo, s_hi), (l_lo, l_hi) = _entropy_ranges(n_sub)
    s_all = np.empty(steps)
    sl_all = np.empty(steps)
    if kind == "cpe":
        theta0 = cpe_phases(n_sub**2, 1, stream)[0]

        def worker(_sub, count, start):
            ts = np.arange(start + 1, start + count + 1, dtype=float)
            return [(start, *_entropies_of_phases(np.outer(ts, theta0), n_sub))]

    elif kind == "cue":
        engine = UnitaryPowers(haar_stack(n_sub**2, 1, stream)[0])

        def worker(_sub, count, start):
            ts = np.arange(start + 1, start + count + 1, dtype=float)
            return [(start, *_entropies_of_gates(engine.power_stack(ts), n_sub))]

    else:
        raise ValueError(f"unknown ensemble kind {kind!r}")

    parts = map_chunks(worker, steps, CHUNK_STEPS, stream.substream(1), threads)
    for chunk_rows in parts:
        for start, s, sl in chunk_rows:
            s_all[start : start + s.size] = s
            sl_all[start : start + sl.size] = sl
    return {
        "hist_S": make_histogram(s_lo, s_hi, bins).add(s_all),
        "hist_SL": make_histogram(l_lo, l_hi, bins).add(sl_all),
        "mom_S": blocked_moments(s_all),
        "mom_SL": blocked_moments(sl_all),
        "sl_values": sl_all,
    }


# ---------------------------------------------------------------------------
# runners

def _base_header(cfg: ExperimentConfig, **extra) -> dict:
    h = {"command": cfg.command, "version": __version__, "seed": cfg.seed}
    h.update(extra)
    return h


def _resolve_alpha(cfg: ExperimentConfig, stream: RandomStream) -> tuple[np.ndarray, bool]:
    """Content triple for trajectory-like commands: given, or generic."""
    if cfg.alpha is not None:
        a = np.asarray(cfg.alpha, dtype=float)
        fixed = not is_canonical(a)
        return canonical_content(a), fixed
    m = cfg.chamber if cfg.chamber is not None else 1
    return generic_alpha(m, stream), False


def _moment_block(prefix: str, m) -> dict:
    """Summary entries for a MomentSummary or blocked-moments dict."""
    if isinstance(m, MomentSummary):
        return {
            f"{prefix}_mean": m.mean,
            f"{prefix}_mean_se": m.stderr_mean,
            f"{prefix}_second": m.second,
            f"{prefix}_second_se": m.stderr_second,
            f"{prefix}_n": m.n,
        }
    return {
        f"{prefix}_mean": m["mean"],
        f"{prefix}_mean_se": m["mean_se"],
        f"{prefix}_second": m["second"],
        f"{prefix}_second_se": m["second_se"],
        f"{prefix}_n": m["n"],
    }


def run_trajectory(cfg: ExperimentConfig) -> Report:
    """Content and entropies along the orbit of one two-qubit gate."""
    steps = 10_000 if cfg.steps is None else cfg.steps
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    stream = RandomStream(cfg.seed)
    alpha, fixed = _resolve_alpha(cfg, stream)
    if cfg.grid is not None:
        if cfg.grid < 1:
            raise ValueError("grid must be positive")
        times = np.linspace(0.0, float(steps), cfg.grid + 1)[1:]
    else:
        times = np.arange(1, steps + 1, dtype=float)
    points = trajectory_content(alpha, times)
    s, sl = analytic_entropies(alpha, times)
    klass = chamber_class(alpha)
    header = _base_header(cfg, steps=steps, alpha=alpha, chamber=klass.m,
                          canonicalized=fixed)
    if cfg.grid is not None:
        header["grid"] = cfg.grid
    rows = [
        (float(t), *map(float, p), float(si), float(li))
        for t, p, si, li in zip(times, points, s, sl)
    ]
    summary = {"alpha": alpha, "chamber": klass.m}
    if len(times) > 0:
        summary.update(_moment_block("S", blocked_moments(s)))
        summary.update(_moment_block("SL", blocked_moments(sl)))
        ref = chamber_moments(klass.m)
        summary.update(
            {"ref_S": ref["S"], "ref_SL": ref["SL"], "ref_S2": ref["S2"],
             "ref_SL2": ref["SL2"]}
        )
    return Report(
        command=cfg.command,
        header=header,
        columns=["t", "alpha1", "alpha2", "alpha3", "shannon", "linear"],
        rows=rows,
        summary=summary,
    )


def _hist_rows(tag: str, quantity: str, hist: Histogram) -> list[tuple]:
    dens = hist.density
    return [
        (tag, quantity, float(hist.edges[i]), float(hist.edges[i + 1]),
         int(hist.counts[i]), float(dens[i]))
        for i in range(hist.counts.size)
    ]


def run_ensemble(cfg: ExperimentConfig) -> Report:
    """Entropy distributions over a gate ensemble or along one gate's orbit."""
    kind = cfg.kind or "cue"
    if kind not in ("cue", "cpe", "gamma"):
        raise ValueError(f"ensemble must be cue, cpe, or gamma, got {kind!r}")
    if cfg.mode not in ("ensemble", "trajectory"):
        raise ValueError(f"mode must be ensemble or trajectory, got {cfg.mode!r}")
    stream = RandomStream(cfg.seed)
    n_sub = 2 if cfg.dim is None else cfg.dim
    tag = kind if kind != "gamma" else f"gamma_{cfg.chamber}"
    extra: dict = {}

    if kind == "gamma":
        if cfg.chamber not in (1, 2, 3):
            raise ValueError("gamma ensembles need --class I, II, or III")
        if n_sub != 2:
            raise ValueError("the content chamber is a two-qubit object")
        (s_lo, s_hi), (l_lo, l_hi) = _entropy_ranges(2)
        if cfg.mode == "ensemble":
            samples = 100_000 if cfg.samples is None else cfg.samples

            def worker(sub, count, _start):
                s, sl = content_entropies(sample_gamma_stack(cfg.chamber, count, sub))
                return {
                    "hist_S": make_histogram(s_lo, s_hi, cfg.bins).add(s),
                    "hist_SL": make_histogram(l_lo, l_hi, cfg.bins).add(sl),
                    "mom_S": MomentSummary.from_values(s),
                    "mom_SL": MomentSummary.from_values(sl),
                    "sl_values": [sl],
                }

            stats = _merge_parts(
                map_chunks(worker, samples, CHUNK_GATES, stream, cfg.threads)
            )
            stats["sl_values"] = np.concatenate(stats["sl_values"])
            count_key, count = "samples", samples
        else:
            steps = 100_000 if cfg.steps is None else cfg.steps
            alpha, _ = _resolve_alpha(cfg, stream)
            t = np.arange(1, steps + 1, dtype=float)
            s, sl = analytic_entropies(alpha, t)
            stats = {
                "hist_S": make_histogram(s_lo, s_hi, cfg.bins).add(s),
                "hist_SL": make_histogram(l_lo, l_hi, cfg.bins).add(sl),
                "mom_S": blocked_moments(s),
                "mom_SL": blocked_moments(sl),
                "sl_values": sl,
            }
            extra["alpha"] = alpha
            count_key, count = "steps", steps
        ref = chamber_moments(cfg.chamber)
        ref_s, ref_sl = ref["S"], ref["SL"]
    else:
        if cfg.mode == "ensemble":
            samples = 100_000 if cfg.samples is None else cfg.samples
            stats = ensemble_entropy_stats(
                kind, n_sub, samples, stream, cfg.threads, cfg.bins
            )
            count_key, count = "samples", samples
        else:
            steps = 10_000 if cfg.steps is None else cfg.steps
            stats = trajectory_entropy_stats(
                kind, n_sub, steps, stream, cfg.threads, cfg.bins
            )
            count_key, count = "steps", steps
        ref_s, ref_sl = (cue_means if kind == "cue" else cpe_means)(n_sub)

    header = _base_header(
        cfg, ensemble=tag, mode=cfg.mode, dim=n_sub, bins=cfg.bins,
        **{count_key: count},
    )
    rows = _hist_rows(tag, "S", stats["hist_S"]) + _hist_rows(
        tag, "SL", stats["hist_SL"]
    )
    summary = {"ensemble": tag, "mode": cfg.mode, "dim": n_sub,
               "ref_S_mean": ref_s, "ref_SL_mean": ref_sl}
    summary.update(_moment_block("S", stats["mom_S"]))
    summary.update(_moment_block("SL", stats["mom_SL"]))
    summary.update(extra)
    if n_sub == 2:
        summary["ks_SL_arcsine"] = ks_distance(stats["sl_values"], arcsine_cdf)
    return Report(
        command=cfg.command,
        header=header,
        columns=["set", "quantity", "bin_lo", "bin_hi", "count", "density"],
        rows=rows,
        summary=summary,
    )


_MOMENT_SETS = ("gamma_1", "gamma_2", "gamma_3", "cue_4", "cpe_4")


def run_moments(cfg: ExperimentConfig) -> Report:
    """First and second entropy moments: analytic vs sampled vs time-averaged.

    Chamber strata are sampled flat (Monte Carlo) and along one generic
    orbit (time average); the two gate ensembles are sampled directly, and
    the diagonal ensemble also along one generic diagonal orbit.  A Haar
    gate's orbit does not reproduce its ensemble at this size, so that
    cell is left empty.
    """
    samples = 100_000 if cfg.samples is None else cfg.samples
    steps = 100_000 if cfg.steps is None else cfg.steps
    stream = RandomStream(cfg.seed)
    nan = float("nan")
    rows = []
    z_values = []

    def emit(set_tag, quantity, analytic, kind, mc_val, mc_se, ta_val, ta_se):
        z_mc = (mc_val - analytic) / mc_se if kind != "asymptotic" and mc_se and np.isfinite(analytic) and np.isfinite(mc_val) else nan
        z_ta = (ta_val - analytic) / ta_se if kind != "asymptotic" and ta_se and np.isfinite(analytic) and np.isfinite(ta_val) else nan
        rows.append(
            (set_tag, quantity, float(analytic), kind, float(mc_val),
             float(mc_se), float(ta_val), float(ta_se), float(z_mc), float(z_ta))
        )
        for z in (z_mc, z_ta):
            if np.isfinite(z):
                z_values.append(abs(z))

    for m in (1, 2, 3):
        sub = stream.substream(m)
        ref = chamber_moments(m)

        def worker(s_stream, count, _start, m=m):
            s, sl = content_entropies(sample_gamma_stack(m, count, s_stream))
            return {"S": MomentSummary.from_values(s),
                    "SL": MomentSummary.from_values(sl)}

        mc = _merge_parts(map_chunks(worker, samples, CHUNK_GATES, sub, cfg.threads))
        alpha = generic_alpha(m, sub.substream(10_000))
        t = np.arange(1, steps + 1, dtype=float)
        s_t, sl_t = analytic_entropies(alpha, t)
        ta_s, ta_sl = blocked_moments(s_t), blocked_moments(sl_t)
        skind = ref["S_kind"]
        emit(f"gamma_{m}", "S", ref["S"], skind, mc["S"].mean,
             mc["S"].stderr_mean, ta_s["mean"], ta_s["mean_se"])
        emit(f"gamma_{m}", "S2", ref["S2"], "quadrature" if m > 2 else skind,
             mc["S"].second, mc["S"].stderr_second, ta_s["second"], ta_s["second_se"])
        emit(f"gamma_{m}", "SL", ref["SL"], "exact", mc["SL"].mean,
             mc["SL"].stderr_mean, ta_sl["mean"], ta_sl["mean_se"])
        emit(f"gamma_{m}", "SL2", ref["SL2"], "exact", mc["SL"].second,
             mc["SL"].stderr_second, ta_sl["second"], ta_sl["second_se"])

    # gate ensembles at N = 2
    for kind_tag, sub_index in (("cue", 4), ("cpe", 5)):
        sub = stream.substream(sub_index)
        est = ensemble_entropy_stats(kind_tag, 2, samples, sub, cfg.threads)
        s_ref, sl_ref = (cue_means if kind_tag == "cue" else cpe_means)(2)
        if kind_tag == "cpe":
            ta = trajectory_entropy_stats("cpe", 2, steps, sub.substream(9), cfg.threads)
            ta_s, ta_sl = ta["mom_S"], ta["mom_SL"]
        else:
            ta_s = ta_sl = {"mean": nan, "mean_se": nan, "second": nan,
                            "second_se": nan}
        gamma1 = chamber_moments(1)
        s_kind = "asymptotic" if kind_tag == "cue" else "exact"
        s2_ref = nan if kind_tag == "cue" else gamma1["S2"]
        sl2_ref = nan if kind_tag == "cue" else gamma1["SL2"]
        emit(f"{kind_tag}_4", "S", s_ref, s_kind, est["mom_S"].mean,
             est["mom_S"].stderr_mean, ta_s["mean"], ta_s["mean_se"])
        emit(f"{kind_tag}_4", "S2", s2_ref,
             "none" if kind_tag == "cue" else "quadrature",
             est["mom_S"].second, est["mom_S"].stderr_second,
             ta_s["second"], ta_s["second_se"])
        emit(f"{kind_tag}_4", "SL", sl_ref, "exact", est["mom_SL"].mean,
             est["mom_SL"].stderr_mean, ta_sl["mean"], ta_sl["mean_se"])
        emit(f"{kind_tag}_4", "SL2", sl2_ref,
             "none" if kind_tag == "cue" else "exact",
             est["mom_SL"].second, est["mom_SL"].stderr_second,
             ta_sl["second"], ta_sl["second_se"])

    header = _base_header(cfg, samples=samples, steps=steps)
    summary = {"max_abs_z": max(z_values) if z_values else nan,
               "n_z": len(z_values)}
    return Report(
        command=cfg.command,
        header=header,
        columns=["set", "quantity", "analytic", "analytic_kind", "mc",
                 "mc_stderr", "tavg", "tavg_stderr", "z_mc", "z_tavg"],
        rows=rows,
        summary=summary,
    )


def _induced_spectra(us: np.ndarray, d: int) -> np.ndarray:
    r = reshuffle(us)
    rho = r @ np.conjugate(np.transpose(r, (0, 2, 1))) / d
    return d * np.linalg.eigvalsh(rho)


def run_spectral(cfg: ExperimentConfig) -> Report:
    """Rescaled Schmidt spectra against the Marchenko-Pastur density."""
    modes = cfg.modes
    valid = {"wishart", "haar", "trajectory"}
    if not modes or not set(modes) <= valid:
        raise ValueError(f"modes must be a subset of {sorted(valid)}, got {modes!r}")
    n_sub = 10 if cfg.dim is None else cfg.dim
    d = n_sub**2
    samples = 1_000 if cfg.samples is None else cfg.samples
    steps = 1_000 if cfg.steps is None else cfg.steps
    stream = RandomStream(cfg.seed)
    x_hi = 5.0
    rows = []
    summary: dict = {"dim": n_sub}

    for mode_index, mode in enumerate(modes):
        sub = stream.substream(mode_index)
        if mode == "trajectory":
            engine = UnitaryPowers(haar_stack(d, 1, sub)[0])

            def worker(_s, count, start, engine=engine):
                ts = np.arange(start + 1, start + count + 1, dtype=float)
                x = _induced_spectra(engine.power_stack(ts), d)
                return {"hist": make_histogram(0.0, x_hi, cfg.bins).add(x),
                        "values": [x.ravel()]}

            total, chunk = steps, CHUNK_BIG
        elif mode == "haar":

            def worker(s, count, _start):
                x = _induced_spectra(haar_stack(d, count, s), d)
                return {"hist": make_histogram(0.0, x_hi, cfg.bins).add(x),
                        "values": [x.ravel()]}

            total, chunk = samples, CHUNK_BIG
        else:

            def worker(s, count, _start):
                w = wishart_stack(d, count, s)
                x = d * np.linalg.eigvalsh(w)
                return {"hist": make_histogram(0.0, x_hi, cfg.bins).add(x),
                        "values": [x.ravel()]}

            total, chunk = samples, CHUNK_BIG

        merged = _merge_parts(map_chunks(worker, total, chunk, sub, cfg.threads))
        values = np.concatenate(merged["values"])
        rows += _hist_rows(mode, "x", merged["hist"])
        summary[f"ks_mp_{mode}"] = ks_distance(values, mp_cdf)
        summary[f"n_values_{mode}"] = int(values.size)
        summary[f"mean_x_{mode}"] = float(values.mean())

    header = _base_header(
        cfg, dim=n_sub, samples=samples, steps=steps, bins=cfg.bins,
        modes=",".join(modes),
    )
    return Report(
        command=cfg.command,
        header=header,
        columns=["set", "quantity", "bin_lo", "bin_hi", "count", "density"],
        rows=rows,
        summary=summary,
    )


_FREENESS_STATS = (
    "wishart_wishart",
    "state_state",
    "reshuffle_power2",
    "reshuffle_power3",
    "unitary_transpose",
)


def _freeness_values(stat: str, d: int, count: int, stream: RandomStream) -> np.ndarray:
    """|Tr a b^dag| samples for one mixed-moment statistic at dimension d."""

    def inner(a, b):
        return np.abs(np.einsum("nij,nij->n", a, np.conjugate(b)))

    if stat == "wishart_wishart":
        return inner(wishart_stack(d, count, stream),
                     wishart_stack(d, count, stream.substream(1)))
    if stat == "state_state":
        r1 = reshuffle(haar_stack(d, count, stream))
        r2 = reshuffle(haar_stack(d, count, stream.substream(1)))
        rho1 = r1 @ np.conjugate(np.transpose(r1, (0, 2, 1))) / d
        rho2 = r2 @ np.conjugate(np.transpose(r2, (0, 2, 1))) / d
        return inner(rho1, rho2)
    if stat in ("reshuffle_power2", "reshuffle_power3"):
        u = haar_stack(d, count, stream)
        p = u @ u if stat == "reshuffle_power2" else u @ u @ u
        return inner(reshuffle(u), reshuffle(p)) / d
    if stat == "unitary_transpose":
        u = haar_stack(d, count, stream)
        return inner(u, np.transpose(u, (0, 2, 1))) / d
    raise ValueError(f"unknown statistic {stat!r}")


def run_freeness(cfg: ExperimentConfig) -> Report:
    """Mixed moments |Tr a b^dag| of independent or derived matrix pairs.

    Asymptotically free pairs give values concentrating near zero as the
    dimension grows; each row reports mean, spread, and standard error
    over the sampled pairs.
    """
    pairs = 10_000 if cfg.pairs is None else cfg.pairs
    dims = cfg.dims
    if any(int(np.sqrt(d)) ** 2 != d for d in dims):
        raise ValueError(f"freeness dims must be perfect squares, got {dims!r}")
    stream = RandomStream(cfg.seed)
    rows = []
    summary: dict = {"pairs": pairs}
    for di, d in enumerate(dims):
        chunk = CHUNK_GATES // 4 if d <= 16 else CHUNK_BIG
        for si, stat in enumerate(_FREENESS_STATS):
            sub = stream.substream(100 * di + si)

            def worker(s, count, _start, stat=stat, d=d):
                return {"mom": MomentSummary.from_values(
                    _freeness_values(stat, d, count, s))}

            merged = _merge_parts(map_chunks(worker, pairs, chunk, sub, cfg.threads))
            mom = merged["mom"]
            std = float(np.sqrt(mom.variance))
            rows.append((stat, d, mom.n, mom.mean, std, mom.stderr_mean))
            summary[f"{stat}_d{d}_mean"] = mom.mean
            summary[f"{stat}_d{d}_std"] = std
    header = _base_header(cfg, pairs=pairs, dims=",".join(map(str, dims)))
    return Report(
        command=cfg.command,
        header=header,
        columns=["statistic", "dim", "pairs", "mean", "std", "stderr"],
        rows=rows,
        summary=summary,
    )


def _target_gate(name: str, stream: RandomStream):
    if name == "local":
        return random_local(stream)
    return named_gate(name)


def run_approximate(cfg: ExperimentConfig) -> Report:
    """Entropy statistics of orbits of generic approximants of named gates.

    Each target is replaced by a nearby generic gate (fidelity at least
    ``min_fidelity``) whose orbit fills its stratum; the linear-entropy
    histogram of the orbit is compared to the arcsine law and, pairwise,
    to the other targets' orbits.
    """
    steps = 100_000 if cfg.steps is None else cfg.steps
    if steps < 1:
        raise ValueError("steps must be positive")
    if not (0.0 < cfg.min_fidelity <= 1.0):
        raise ValueError("min-fidelity must be in (0, 1]")
    stream = RandomStream(cfg.seed)
    rows = []
    summary: dict = {"min_fidelity": cfg.min_fidelity, "steps": steps}
    sl_sets: dict[str, np.ndarray] = {}
    t = np.arange(1, steps + 1, dtype=float)
    for i, name in enumerate(cfg.targets):
        sub = stream.substream(i)
        gate = _target_gate(name, sub)
        base = chamber_class(canonical_content(
            content_batch(np.asarray(gate.matrix)[None])[0]))
        m = cfg.chamber if cfg.chamber is not None else base.m
        alpha, achieved = approximate_gate(
            gate, cfg.min_fidelity, sub.generator, chamber=m
        )
        s, sl = analytic_entropies(alpha, t)
        hist = make_histogram(0.0, 1.0, cfg.bins).add(sl)
        rows += _hist_rows(name, "SL", hist)
        sl_sets[name] = sl
        summary[f"{name}_alpha"] = alpha
        summary[f"{name}_fidelity"] = achieved
        summary[f"{name}_chamber"] = int(chamber_class(alpha).m)
        summary[f"{name}_ks_arcsine"] = ks_distance(sl, arcsine_cdf)
        summary[f"{name}_SL_mean"] = float(sl.mean())
    names = list(cfg.targets)
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            summary[f"ks_{a}_{b}"] = ks_two_sample(sl_sets[a], sl_sets[b])
    header = _base_header(
        cfg, targets=",".join(cfg.targets), min_fidelity=cfg.min_fidelity,
        steps=steps, bins=cfg.bins,
        chamber=cfg.chamber if cfg.chamber is not None else "",
    )
    return Report(
        command=cfg.command,
        header=header,
        columns=["set", "quantity", "bin_lo", "bin_hi", "count", "density"],
        rows=rows,
        summary=summary,
    )


def run_interlace(cfg: ExperimentConfig) -> Report:
    """Orbits of one gate interlaced with random local gates.

    The content at t = 1 is blind to the local factor, but from t = 2 on
    the orbit leaves the initial stratum: the second component activates
    at t = 2 and the third at t = 3 for almost every dressing.
    """
    samples = 10_000 if cfg.samples is None else cfg.samples
    steps = 20 if cfg.steps is None else cfg.steps
    if steps < 1 or samples < 1:
        raise ValueError("samples and steps must be positive")
    stream = RandomStream(cfg.seed)
    if cfg.alpha is not None:
        alpha = canonical_content(np.asarray(cfg.alpha, dtype=float))
    else:
        alpha = np.array([0.137 * np.pi, 0.0, 0.0])
    v = cartan_matrix(alpha)

    def worker(sub, count, start):
        y = local_stack(count, sub)
        u = v[None] @ y
        p = u.copy()
        per_t = [content_batch(p)]
        for _ in range(steps - 1):
            p = p @ u
            per_t.append(content_batch(p))
        return {"blocks": [(start, per_t)]}

    merged = _merge_parts(map_chunks(worker, samples, 2_000, stream, cfg.threads))
    frac2 = np.zeros(steps)
    frac3 = np.zeros(steps)
    ordered = []
    for start, per_t in merged["blocks"]:
        count = per_t[0].shape[0]
        for t0, pts in enumerate(per_t):
            frac2[t0] += int(np.sum(pts[:, 1] > 1e-9))
            frac3[t0] += int(np.sum(pts[:, 2] > 1e-9))
        for j in range(count):
            for t0, pts in enumerate(per_t):
                ordered.append((start + j, t0 + 1, float(pts[j, 0]),
                                float(pts[j, 1]), float(pts[j, 2])))
    base = trajectory_content(alpha, np.arange(1, steps + 1, dtype=float))
    header = _base_header(cfg, alpha=alpha, samples=samples, steps=steps)
    summary = {
        "alpha": alpha,
        "frac_alpha2_active": (frac2 / samples).tolist(),
        "frac_alpha3_active": (frac3 / samples).tolist(),
        "base_alpha2_max": float(np.max(base[:, 1])),
        "base_alpha3_max": float(np.max(base[:, 2])),
        "zero_tol": 1e-9,
    }
    return Report(
        command=cfg.command,
        header=header,
        columns=["sample", "t", "alpha1", "alpha2", "alpha3"],
        rows=ordered,
        summary=summary,
    )


def run_tables(cfg: ExperimentConfig) -> Report:
    """Combined reference tables: entropy moments and mixed-moment rows."""
    samples = 200_000 if cfg.samples is None else cfg.samples
    steps = 100_000 if cfg.steps is None else cfg.steps
    pairs = 2_000 if cfg.pairs is None else cfg.pairs
    moments = run_moments(
        replace(cfg, command="moments", samples=samples, steps=steps)
    )
    freeness = run_freeness(replace(cfg, command="freeness", pairs=pairs))
    rows = []
    for (set_tag, quantity, analytic, kind, mc, mc_se, ta, ta_se, z_mc,
         z_ta) in moments.rows:
        rows.append(("entropy_moments", set_tag, quantity, "analytic",
                     analytic, 0.0, kind))
        rows.append(("entropy_moments", set_tag, quantity, "monte_carlo",
                     mc, mc_se, kind))
        rows.append(("entropy_moments", set_tag, quantity, "time_average",
                     ta, ta_se, kind))
    for stat, d, n, mean, std, se in freeness.rows:
        rows.append(("mixed_moments", f"{stat}_d{d}", "abs_trace",
                     "monte_carlo", mean, std, "sampled"))
    header = _base_header(cfg, samples=samples, steps=steps, pairs=pairs)
    summary = {"moments": moments.summary, "freeness": freeness.summary}
    return Report(
        command=cfg.command,
        header=header,
        columns=["table", "label", "quantity", "source", "value", "error",
                 "kind"],
        rows=rows,
        summary=summary,
    )


RUNNERS = {
    "trajectory": run_trajectory,
    "ensemble": run_ensemble,
    "moments": run_moments,
    "spectral": run_spectral,
    "freeness": run_freeness,
    "approximate": run_approximate,
    "interlace": run_interlace,
    "tables": run_tables,
}


def run_experiment(cfg: ExperimentConfig) -> Report:
    """Dispatch a config to its runner and stamp the wall-clock duration."""
    t0 = time.perf_counter()
    report = RUNNERS[cfg.command](cfg)
    report.header["duration_s"] = round(time.perf_counter() - t0, 3)
    return report
