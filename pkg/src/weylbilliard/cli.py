"""Command-line interface.

``weylbilliard COMMAND [flags]`` runs one experiment and writes a report
(CSV with a ``# key=value`` header line, or JSON with ``--format json``)
plus an optional PNG figure (``--plot``).  Runs are deterministic: the
same command line with the same ``--seed`` reproduces the same bytes,
apart from the ``duration_s`` header entry.

Exit codes: 0 success, 2 bad configuration or arguments, 3 search budget
exhausted while looking for a generic approximant.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .experiments import (
    COMMANDS,
    ExperimentConfig,
    run_experiment,
    write_report,
)
from .weyl import SearchBudgetError

_CLASS_NAMES = {"i": 1, "ii": 2, "iii": 3, "1": 1, "2": 2, "3": 3}


def parse_angle(text: str) -> float:
    """Parse one angle: plain float, ``pi/8``, ``0.137pi``, ``3pi/16``."""
    s = text.strip().lower().replace(" ", "").replace("*", "")
    if "pi" not in s:
        return float(s)
    head, tail = s.split("pi", 1)
    if head in ("", "+"):
        coeff = 1.0
    elif head == "-":
        coeff = -1.0
    else:
        coeff = float(head)
    value = coeff * np.pi
    if tail:
        if not tail.startswith("/"):
            raise ValueError(f"cannot parse angle {text!r}")
        value /= float(tail[1:])
    return value


def parse_alpha(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"alpha needs three comma-separated angles, got {text!r}")
    return tuple(parse_angle(p) for p in parts)


def parse_chamber(text: str) -> int:
    key = text.strip().lower()
    if key not in _CLASS_NAMES:
        raise ValueError(f"class must be I, II, or III, got {text!r}")
    return _CLASS_NAMES[key]


def _parse_seed(text: str) -> int:
    return int(text, 0)


def _default_seed() -> int:
    env = os.environ.get("WEYL_SEED")
    if env:
        return _parse_seed(env)
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=_parse_seed, default=None,
                   help="RNG seed (int, 0x.. ok; default $WEYL_SEED or 0)")
    p.add_argument("--out", type=Path, default=None,
                   help="output path (default <command>.<format>)")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="report format (default csv)")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads; results do not depend on this")
    p.add_argument("--plot", nargs="?", const="auto", default=None,
                   metavar="PNG", help="also render a figure "
                   "(default path: output stem + .png)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weylbilliard",
        description="long-time statistics of bipartite gate orbits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trajectory",
                       help="content and entropies along one gate orbit")
    p.add_argument("--alpha", type=parse_alpha, default=None,
                   help='content triple, e.g. "pi/8,0.1,0.02" or "0.137pi,0,0"')
    p.add_argument("--class", dest="chamber", type=parse_chamber, default=None,
                   help="chamber stratum I/II/III for a generic start")
    p.add_argument("--steps", type=int, default=None,
                   help="number of integer times (default 10000)")
    p.add_argument("--grid", type=int, default=None,
                   help="sample this many real times on (0, steps] instead")
    _add_common(p)

    p = sub.add_parser("ensemble",
                       help="entropy histograms for a gate ensemble or orbit")
    p.add_argument("--ensemble", dest="kind",
                   choices=("cue", "cpe", "gamma"), default="cue")
    p.add_argument("--mode", choices=("ensemble", "trajectory"),
                   default="ensemble",
                   help="independent draws, or powers of one draw")
    p.add_argument("--class", dest="chamber", type=parse_chamber, default=None,
                   help="stratum for --ensemble gamma")
    p.add_argument("--alpha", type=parse_alpha, default=None,
                   help="start for gamma trajectories (default: generic)")
    p.add_argument("--dim", type=int, default=None,
                   help="subsystem dimension N (default 2)")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--bins", type=int, default=100)
    _add_common(p)

    p = sub.add_parser("moments",
                       help="entropy moments: analytic vs sampled vs orbit")
    p.add_argument("--samples", type=int, default=None,
                   help="ensemble draws per set (default 100000)")
    p.add_argument("--steps", type=int, default=None,
                   help="orbit length for time averages (default 100000)")
    _add_common(p)

    p = sub.add_parser("spectral",
                       help="induced-state spectra vs the Marchenko-Pastur law")
    p.add_argument("--modes", type=lambda s: tuple(s.split(",")),
                   default=("wishart", "haar", "trajectory"),
                   help="comma list from wishart,haar,trajectory")
    p.add_argument("--dim", type=int, default=None,
                   help="subsystem dimension N (default 10, so d = 100)")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--bins", type=int, default=100)
    _add_common(p)

    p = sub.add_parser("freeness",
                       help="mixed moments |Tr a b^dag| of matrix pairs")
    p.add_argument("--pairs", type=int, default=None,
                   help="sampled pairs per statistic (default 10000)")
    p.add_argument("--dims", type=lambda s: tuple(int(x) for x in s.split(",")),
                   default=(4, 100), help="total dimensions, e.g. 4,100")
    _add_common(p)

    p = sub.add_parser("approximate",
                       help="orbit statistics of generic approximants")
    p.add_argument("--targets", type=lambda s: tuple(s.split(",")),
                   default=("cnot", "sqrt_cnot", "swap", "sqrt_swap"),
                   help="comma list of cnot,sqrt_cnot,swap,sqrt_swap,local")
    p.add_argument("--min-fidelity", type=float, default=0.998)
    p.add_argument("--class", dest="chamber", type=parse_chamber, default=None,
                   help="force the approximant stratum (default: target's)")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--bins", type=int, default=100)
    _add_common(p)

    p = sub.add_parser("interlace",
                       help="orbits interlaced with random local gates")
    p.add_argument("--alpha", type=parse_alpha, default=None,
                   help="base content (default 0.137pi,0,0)")
    p.add_argument("--samples", type=int, default=None,
                   help="random local dressings (default 10000)")
    p.add_argument("--steps", type=int, default=None,
                   help="orbit length per dressing (default 20)")
    _add_common(p)

    p = sub.add_parser("tables",
                       help="combined moment and mixed-moment tables")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--pairs", type=int, default=None)
    _add_common(p)

    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    kwargs = {
        "command": args.command,
        "seed": args.seed if args.seed is not None else _default_seed(),
        "threads": args.threads,
        "fmt": args.format,
    }
    for name in ("samples", "steps", "dim", "chamber", "alpha", "bins",
                 "kind", "mode", "modes", "targets", "min_fidelity", "dims",
                 "pairs", "grid"):
        if hasattr(args, name) and getattr(args, name) is not None:
            kwargs[name] = getattr(args, name)
    return ExperimentConfig(**kwargs)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out = args.out if args.out is not None else Path(f"{cfg.command}.{cfg.fmt}")
    try:
        report = run_experiment(cfg)
    except SearchBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    written = write_report(report, out, cfg.fmt)
    if args.plot is not None:
        from .plotting import render

        target = Path(args.plot) if args.plot != "auto" else out.with_suffix(".png")
        written.append(render(report, target))
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
