"""Figure rendering for experiment reports.

Every report can be turned into a single PNG summarizing its rows; the
CLI does this when ``--plot`` is given.  Uses the Agg backend so it works
headless.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .stats import arcsine_pdf, mp_pdf

_COLORS = plt.rcParams["axes.prop_cycle"].by_key()["color"]


def _col(report, name):
    i = report.columns.index(name)
    return np.array([row[i] for row in report.rows])


def _hist_sets(report):
    """Group histogram rows by (set, quantity) keeping first-seen order."""
    sets = {}
    i_set = report.columns.index("set")
    i_q = report.columns.index("quantity")
    for row in report.rows:
        key = (row[i_set], row[i_q])
        sets.setdefault(key, []).append(row)
    out = {}
    for key, rows in sets.items():
        lo = np.array([r[report.columns.index("bin_lo")] for r in rows])
        hi = np.array([r[report.columns.index("bin_hi")] for r in rows])
        dens = np.array([r[report.columns.index("density")] for r in rows])
        out[key] = (np.append(lo, hi[-1]), dens)
    return out


def _step_density(ax, edges, dens, label, color):
    ax.stairs(dens, edges, label=label, color=color, lw=1.3)


def _plot_trajectory(fig, report):
    t = _col(report, "t")
    axes = fig.subplots(2, 1, sharex=False)
    show = slice(0, min(400, t.size))
    for k, name in enumerate(("alpha1", "alpha2", "alpha3")):
        axes[0].plot(t[show], _col(report, name)[show], ".", ms=2.5,
                     color=_COLORS[k], label=rf"$\alpha_{k + 1}$")
    axes[0].set_xlabel("t")
    axes[0].set_ylabel("content")
    axes[0].set_ylim(-0.02, np.pi / 4 + 0.02)
    axes[0].legend(loc="upper right", fontsize=8)
    s = _col(report, "shannon")
    sl = _col(report, "linear")
    axes[1].plot(t[show], s[show], lw=0.8, color=_COLORS[0], label="S")
    axes[1].plot(t[show], sl[show], lw=0.8, color=_COLORS[1], label="S_L")
    for key, color in (("ref_S", _COLORS[0]), ("ref_SL", _COLORS[1])):
        if key in report.summary:
            axes[1].axhline(report.summary[key], color=color, ls="--", lw=0.8)
    axes[1].set_xlabel("t")
    axes[1].set_ylabel("entropy")
    axes[1].legend(loc="upper right", fontsize=8)


def _plot_histogram_report(fig, report, overlay=None):
    """One panel per quantity, one curve per set."""
    groups = _hist_sets(report)
    quantities = list(dict.fromkeys(q for _, q in groups))
    axes = fig.subplots(1, len(quantities), squeeze=False)[0]
    for ax, q in zip(axes, quantities):
        ci = 0
        for (tag, gq), (edges, dens) in groups.items():
            if gq != q:
                continue
            _step_density(ax, edges, dens, tag, _COLORS[ci % len(_COLORS)])
            ci += 1
        if overlay is not None:
            overlay(ax, q)
        ax.set_xlabel(q)
        ax.set_ylabel("density")
        ax.legend(fontsize=8)


def _arcsine_overlay(ax, q):
    if q in ("SL", "linear"):
        x = np.linspace(1e-4, 0.5 - 1e-4, 400)
        ax.plot(x, arcsine_pdf(x), "k--", lw=1.0, label="arcsine")
        ax.set_ylim(0, 8)


def _mp_overlay(ax, q):
    x = np.linspace(1e-3, 4.0, 500)
    ax.plot(x, mp_pdf(x), "k--", lw=1.0, label="MP")


def _plot_moments(fig, report):
    sets = _col(report, "set")
    quantities = _col(report, "quantity")
    labels = [f"{s}:{q}" for s, q in zip(sets, quantities)]
    z_mc = _col(report, "z_mc").astype(float)
    z_ta = _col(report, "z_tavg").astype(float)
    ax = fig.subplots()
    x = np.arange(len(labels))
    ax.plot(x, z_mc, "o", label="ensemble vs analytic", color=_COLORS[0])
    ax.plot(x, z_ta, "s", label="time average vs analytic", color=_COLORS[1])
    for y in (-3, 3):
        ax.axhline(y, color="0.6", ls=":", lw=0.8)
    ax.axhline(0, color="0.3", lw=0.8)
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("z score")
    ax.legend(fontsize=8)


def _plot_freeness(fig, report):
    stats = _col(report, "statistic")
    dims = _col(report, "dim").astype(int)
    means = _col(report, "mean").astype(float)
    stds = _col(report, "std").astype(float)
    ax = fig.subplots()
    order = list(dict.fromkeys(stats))
    for di, d in enumerate(sorted(set(dims))):
        sel = dims == d
        xs = [order.index(s) + 0.12 * di for s in stats[sel]]
        ax.errorbar(xs, means[sel], yerr=stds[sel], fmt="o", capsize=3,
                    label=f"d = {d}", color=_COLORS[di])
    ax.set_yscale("log")
    ax.set_xticks(range(len(order)))
    ax.set_xticklabels(order, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel(r"$|\mathrm{Tr}\, a b^\dagger|$")
    ax.legend(fontsize=8)


def _plot_interlace(fig, report):
    f2 = np.asarray(report.summary["frac_alpha2_active"], dtype=float)
    f3 = np.asarray(report.summary["frac_alpha3_active"], dtype=float)
    t = np.arange(1, f2.size + 1)
    ax = fig.subplots()
    ax.plot(t, f2, "o-", label=r"$\alpha_2 > 0$", color=_COLORS[0])
    ax.plot(t, f3, "s-", label=r"$\alpha_3 > 0$", color=_COLORS[1])
    ax.set_xlabel("t")
    ax.set_ylabel("fraction of dressed orbits")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=8)


def _plot_tables(fig, report):
    i_tab = report.columns.index("table")
    i_src = report.columns.index("source")
    rows = [r for r in report.rows if r[i_tab] == "entropy_moments"]
    labels = list(dict.fromkeys(f"{r[1]}:{r[2]}" for r in rows))
    ax = fig.subplots()
    for src, marker, color in (("analytic", "_", "0.2"),
                               ("monte_carlo", "o", _COLORS[0]),
                               ("time_average", "s", _COLORS[1])):
        sel = [r for r in rows if r[i_src] == src]
        xs = [labels.index(f"{r[1]}:{r[2]}") for r in sel]
        ys = [r[4] for r in sel]
        es = [r[5] for r in sel]
        ax.errorbar(xs, ys, yerr=es, fmt=marker, ms=7, capsize=2,
                    label=src, color=color, ls="none")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("moment value")
    ax.legend(fontsize=8)


def render(report, path) -> Path:
    """Render ``report`` to a PNG at ``path`` and return the path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    command = report.command
    if command in ("ensemble", "spectral", "approximate"):
        n_panels = len({q for _, q in _hist_sets(report)})
        fig = plt.figure(figsize=(4.2 * max(n_panels, 1), 3.4))
    elif command == "trajectory":
        fig = plt.figure(figsize=(7.0, 5.6))
    else:
        fig = plt.figure(figsize=(7.2, 4.2))
    try:
        if command == "trajectory":
            _plot_trajectory(fig, report)
        elif command == "ensemble":
            _plot_histogram_report(fig, report, overlay=_arcsine_overlay)
        elif command == "spectral":
            _plot_histogram_report(fig, report, overlay=_mp_overlay)
        elif command == "approximate":
            _plot_histogram_report(fig, report, overlay=_arcsine_overlay)
        elif command == "moments":
            _plot_moments(fig, report)
        elif command == "freeness":
            _plot_freeness(fig, report)
        elif command == "interlace":
            _plot_interlace(fig, report)
        elif command == "tables":
            _plot_tables(fig, report)
        else:
            raise ValueError(f"no figure defined for command {command!r}")
        fig.tight_layout()
        fig.savefig(path, dpi=150)
    finally:
        plt.close(fig)
    return path
