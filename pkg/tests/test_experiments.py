import json
from pathlib import Path

import numpy as np
import pytest

from weylbilliard.cli import main, parse_alpha, parse_angle, parse_chamber
from weylbilliard.ensembles import RandomStream
from weylbilliard.experiments import (
    ExperimentConfig,
    map_chunks,
    run_ensemble,
    run_experiment,
    run_freeness,
    run_interlace,
    run_moments,
    run_spectral,
    run_trajectory,
    write_report,
)


# ------------------------------------------------------------ config

def test_config_rejects_unknown_command():
    with pytest.raises(ValueError):
        ExperimentConfig(command="billiards")


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(command="trajectory", seed=-1)
    with pytest.raises(ValueError):
        ExperimentConfig(command="trajectory", threads=0)
    with pytest.raises(ValueError):
        ExperimentConfig(command="trajectory", fmt="xml")
    with pytest.raises(ValueError):
        ExperimentConfig(command="ensemble", dim=1)


# --------------------------------------------------------- map_chunks

def test_map_chunks_order_and_determinism():
    def worker(stream, count, start):
        return {"vals": [np.concatenate(
            [[start]], )] , "draw": [stream.generator.normal(size=count)]}

    one = map_chunks(worker, 100, 7, RandomStream(5), threads=1)
    four = map_chunks(worker, 100, 7, RandomStream(5), threads=4)
    assert len(one) == len(four) == 15
    for a, b in zip(one, four):
        assert np.array_equal(a["draw"][0], b["draw"][0])
        assert a["vals"][0] == b["vals"][0]
    # chunk sizes: 14 full chunks of 7 plus a remainder of 2
    assert one[-1]["draw"][0].size == 2


# ------------------------------------------------------------ writers

def test_csv_report_layout(tmp_path):
    cfg = ExperimentConfig(command="trajectory", steps=5,
                           alpha=(0.3, 0.1, 0.05), seed=1)
    report = run_experiment(cfg)
    out = tmp_path / "r.csv"
    written = write_report(report, out, "csv")
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# command=trajectory ")
    assert lines[0].rstrip().split()[-1].startswith("duration_s=")
    assert lines[1] == "t,alpha1,alpha2,alpha3,shannon,linear"
    assert len(lines) == 2 + 5
    # sidecar carries the summary
    side = out.with_suffix(".summary.json")
    assert side in written
    doc = json.loads(side.read_text())
    assert doc["summary"]["chamber"] == 3


def test_json_report_layout(tmp_path):
    cfg = ExperimentConfig(command="trajectory", steps=3,
                           alpha=(0.3, 0.0, 0.0), fmt="json")
    report = run_experiment(cfg)
    out = tmp_path / "r.json"
    write_report(report, out, "json")
    doc = json.loads(out.read_text())
    assert set(doc) == {"header", "summary", "columns", "rows"}
    assert len(doc["rows"]) == 3
    assert doc["header"]["command"] == "trajectory"


def test_reports_are_reproducible(tmp_path):
    def emit(name, threads):
        cfg = ExperimentConfig(command="ensemble", kind="cue", samples=4000,
                               seed=9, threads=threads)
        out = tmp_path / name
        write_report(run_experiment(cfg), out, "csv")
        lines = out.read_text().splitlines()
        head = " ".join(t for t in lines[0].split()
                        if not t.startswith("duration_s="))
        return head, lines[1:]

    first = emit("a.csv", threads=1)
    second = emit("b.csv", threads=3)
    assert first == second


# ------------------------------------------------------------ runners

def test_run_trajectory_canonicalizes_input():
    cfg = ExperimentConfig(command="trajectory", steps=4,
                           alpha=(0.1, 0.8, -0.3))
    report = run_trajectory(cfg)
    assert report.header["canonicalized"] == 1
    a = np.asarray(report.header["alpha"])
    assert a[0] >= a[1] >= a[2] >= 0


def test_run_trajectory_grid():
    cfg = ExperimentConfig(command="trajectory", steps=10, grid=5,
                           alpha=(0.3, 0.0, 0.0))
    report = run_trajectory(cfg)
    assert [row[0] for row in report.rows] == [2.0, 4.0, 6.0, 8.0, 10.0]


def test_run_trajectory_zero_steps_is_header_only():
    cfg = ExperimentConfig(command="trajectory", steps=0, alpha=(0.3, 0, 0))
    report = run_trajectory(cfg)
    assert report.rows == []


def test_run_ensemble_histogram_accounting():
    cfg = ExperimentConfig(command="ensemble", kind="cpe", samples=3000,
                           bins=25, seed=2)
    report = run_ensemble(cfg)
    assert len(report.rows) == 2 * 25
    counts = sum(r[4] for r in report.rows if r[1] == "SL")
    assert counts <= 3000
    assert report.summary["SL_n"] == 3000
    assert report.summary["ks_SL_arcsine"] < 0.05  # diagonal gates at N=2


def test_run_ensemble_gamma_needs_chamber():
    with pytest.raises(ValueError):
        run_ensemble(ExperimentConfig(command="ensemble", kind="gamma",
                                      samples=10))


def test_run_ensemble_trajectory_mode():
    cfg = ExperimentConfig(command="ensemble", kind="cue", mode="trajectory",
                           steps=2000, seed=3)
    report = run_ensemble(cfg)
    assert report.header["steps"] == 2000
    assert report.summary["S_n"] == 2000


def test_run_moments_schema():
    cfg = ExperimentConfig(command="moments", samples=4000, steps=4000, seed=4)
    report = run_moments(cfg)
    sets = {row[0] for row in report.rows}
    assert sets == {"gamma_1", "gamma_2", "gamma_3", "cue_4", "cpe_4"}
    assert len(report.rows) == 5 * 4
    by_key = {(r[0], r[1]): r for r in report.rows}
    # a Haar gate's own orbit is not ergodic over the ensemble: left empty
    assert np.isnan(by_key[("cue_4", "S")][6])
    # exact references come with finite z scores
    assert np.isfinite(by_key[("gamma_1", "SL")][8])
    cols = report.columns
    assert cols[2] == "analytic" and cols[8] == "z_mc"


def test_run_spectral_modes_and_ks():
    cfg = ExperimentConfig(command="spectral", dim=5, samples=150, steps=150,
                           modes=("wishart", "haar"), seed=5)
    report = run_spectral(cfg)
    assert set(r[0] for r in report.rows) == {"wishart", "haar"}
    assert report.summary["ks_mp_wishart"] < 0.05
    assert report.summary["n_values_haar"] == 150 * 25


def test_run_spectral_rejects_unknown_mode():
    with pytest.raises(ValueError):
        run_spectral(ExperimentConfig(command="spectral", modes=("foo",)))


def test_run_freeness_row_schema():
    cfg = ExperimentConfig(command="freeness", pairs=60, dims=(4,), seed=6)
    report = run_freeness(cfg)
    assert len(report.rows) == 5
    for stat, d, n, mean, std, se in report.rows:
        assert d == 4 and n == 60
        assert 0 < mean < 1
        assert se < std or std == 0


def test_run_freeness_rejects_non_square_dims():
    with pytest.raises(ValueError):
        run_freeness(ExperimentConfig(command="freeness", pairs=10, dims=(6,)))


def test_run_interlace_row_order_and_fractions():
    cfg = ExperimentConfig(command="interlace", samples=40, steps=3, seed=7)
    report = run_interlace(cfg)
    assert len(report.rows) == 40 * 3
    # sample-major ordering with t ascending inside each sample
    assert [r[:2] for r in report.rows[:4]] == [(0, 1), (0, 2), (0, 3), (1, 1)]
    f2 = report.summary["frac_alpha2_active"]
    f3 = report.summary["frac_alpha3_active"]
    assert f2[0] < 0.05 and f3[0] < 0.05  # content at t=1 ignores dressing
    assert f2[1] > 0.9
    assert f3[2] > 0.9
    assert report.summary["base_alpha2_max"] == 0.0


def test_run_tables_composition():
    cfg = ExperimentConfig(command="tables", samples=3000, steps=3000,
                           pairs=40, dims=(4,), seed=8)
    report = run_experiment(cfg)
    tables = {r[0] for r in report.rows}
    assert tables == {"entropy_moments", "mixed_moments"}
    ent = [r for r in report.rows if r[0] == "entropy_moments"]
    assert len(ent) == 5 * 4 * 3  # analytic / monte_carlo / time_average
    assert "duration_s" in report.header


# ---------------------------------------------------------------- CLI

def test_parse_angle_forms():
    assert parse_angle("0.25") == 0.25
    assert parse_angle("pi/8") == pytest.approx(np.pi / 8)
    assert parse_angle("0.137pi") == pytest.approx(0.137 * np.pi)
    assert parse_angle("3pi/16") == pytest.approx(3 * np.pi / 16)
    assert parse_angle("-pi/4") == pytest.approx(-np.pi / 4)
    assert parse_angle("0.5 * pi") == pytest.approx(np.pi / 2)
    with pytest.raises(ValueError):
        parse_angle("pi8")


def test_parse_alpha_and_chamber():
    assert parse_alpha("pi/8,0,0") == pytest.approx((np.pi / 8, 0, 0))
    with pytest.raises(ValueError):
        parse_alpha("1,2")
    assert parse_chamber("II") == 2
    assert parse_chamber("3") == 3
    with pytest.raises(ValueError):
        parse_chamber("IV")


def test_cli_writes_report_and_plot(tmp_path):
    out = tmp_path / "traj.csv"
    code = main(["trajectory", "--alpha", "0.137pi,0,0", "--steps", "20",
                 "--out", str(out), "--plot"])
    assert code == 0
    assert out.exists()
    assert out.with_suffix(".summary.json").exists()
    assert out.with_suffix(".png").stat().st_size > 1000


def test_cli_plot_path_override(tmp_path):
    out = tmp_path / "e.json"
    png = tmp_path / "figs" / "e.png"
    code = main(["ensemble", "--ensemble", "cpe", "--samples", "500",
                 "--format", "json", "--out", str(out), "--plot", str(png)])
    assert code == 0
    assert png.exists()


def test_cli_seed_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("WEYL_SEED", "0x2a")
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    main(["ensemble", "--ensemble", "cpe", "--samples", "300",
          "--out", str(out1)])
    monkeypatch.delenv("WEYL_SEED")
    main(["ensemble", "--ensemble", "cpe", "--samples", "300", "--seed", "42",
          "--out", str(out2)])
    assert out1.read_text().splitlines()[2:] == out2.read_text().splitlines()[2:]


def test_cli_bad_config_exits_2(tmp_path, capsys):
    code = main(["ensemble", "--ensemble", "gamma", "--samples", "10",
                 "--out", str(tmp_path / "x.csv")])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_cli_search_budget_exits_3(tmp_path, monkeypatch):
    from weylbilliard import experiments
    from weylbilliard.weyl import SearchBudgetError

    def explode(*a, **k):
        raise SearchBudgetError("no generic gate found")

    monkeypatch.setattr(experiments, "approximate_gate", explode)
    code = main(["approximate", "--steps", "10",
                 "--out", str(tmp_path / "x.csv")])
    assert code == 3


def test_cli_rejects_unknown_command():
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2
