import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmotion.cli import EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC, EXIT_OK, main
from qmotion.io import Table, fmt, parse_csv, render_svg, to_csv, to_json
from qmotion.validation import run_validation


def run_csv(tmp_path, *args, name="out.csv"):
    out = tmp_path / name
    assert main([*args, "--out", str(out)]) == EXIT_OK
    return parse_csv(out.read_text())


# ------------------------------------------------------------ formatting


def test_fixed_precision_format():
    assert fmt(1.0) == "1.00000000000e+00"
    assert fmt(-1234.56789012345) == "-1.23456789012e+03"
    assert fmt(math.nan) == "nan"
    assert fmt(math.inf) == "inf"


finite = st.floats(-1e300, 1e300, allow_nan=False, allow_infinity=False)


@given(st.lists(st.tuples(finite, finite | st.just(math.nan)), min_size=1, max_size=20))
def test_csv_round_trip(rows):
    table = Table(["x", "y"], np.array(rows), {"command": "test", "note": "a: b"})
    back = parse_csv(to_csv(table))
    assert back.columns == ["x", "y"]
    assert back.meta["command"] == "test" and back.meta["note"] == "a: b"
    np.testing.assert_allclose(back.data, table.data, rtol=1e-11, equal_nan=True)


def test_parse_rejects_bad_input():
    for text in ("", "# only: header\n", "# a: b\nx,y\n", "x,y\n1,2,3\n", "x,y\n1,abc\n"):
        with pytest.raises(ValueError):
            parse_csv(text)


def test_json_layout():
    table = Table(["gt", "C"], [[0.0, 1.0], [1.0, math.nan]], {"params": "p", "grid": "g", "x": "1"})
    doc = json.loads(to_json(table))
    assert {"params", "grid", "series"} <= set(doc)
    assert doc["grid"]["values"] == [0.0, 1.0]
    assert doc["series"] == [{"name": "C", "values": [1.0, None]}]


def test_table_shape_checked():
    with pytest.raises(ValueError):
        Table(["a"], [[1.0, 2.0]])


# ------------------------------------------------------------ svg


def polylines(svg):
    return svg.count("<polyline")


def test_svg_has_one_line_per_series_and_is_deterministic():
    t = np.linspace(0, 1, 11)
    table = Table(["gt", "a", "b", "c"], np.column_stack([t, t, t**2, t**3]), {"ylabel": "C"})
    svg = render_svg(table)
    assert polylines(svg) == 3
    assert svg == render_svg(table)
    assert "gt" in svg and ">C<" in svg
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")


def test_svg_breaks_lines_at_gaps():
    t = np.linspace(0, 1, 11)
    y = t.copy()
    y[[3, 7]] = np.nan
    assert polylines(render_svg(Table(["gt", "y"], np.column_stack([t, y])))) == 3


def test_svg_log_scale_dashes_negative_stretches():
    t = np.linspace(0, 1, 11)
    y = np.where(t < 0.5, 1.0 + t, -(1.0 + t))
    svg = render_svg(Table(["gt", "y"], np.column_stack([t, y]), {"yscale": "log"}))
    assert polylines(svg) == 2 and svg.count("stroke-dasharray") == 1
    assert "log10" in svg


def test_svg_rejects_empty_data():
    with pytest.raises(ValueError):
        render_svg(Table(["gt", "y"], np.empty((0, 2))))
    with pytest.raises(ValueError):
        render_svg(Table(["gt", "y"], [[0.0, math.nan]]))


def test_svg_pivots_long_tables():
    data = [[0.1, 0.0, 1.0], [0.2, 0.0, 0.5], [0.1, 1e-10, 0.8], [0.2, 1e-10, 0.3]]
    svg = render_svg(Table(["lambda_ratio", "beta", "N"], data, {"group": "beta", "value": "N"}))
    assert polylines(svg) == 2 and "beta=1e-10" in svg


# ------------------------------------------------------------ commands


def test_coherence_preset_has_three_series(tmp_path):
    table = run_csv(tmp_path, "coherence", "--preset", "fig4a")
    assert table.columns == ["gt", "C@beta=0", "C@beta=5e-11", "C@beta=1e-10"]
    assert table.data[0, 1:] == pytest.approx([1.0, 1.0, 1.0])
    assert table.meta["preset"] == "fig4a"
    assert "omega0=" in table.meta["params"]
    assert table.data[-1, 0] == 400.0


def test_markovian_coherence_decays(tmp_path):
    table = run_csv(tmp_path, "coherence", "--preset", "fig6b")
    C = table.data[:, 1:]
    assert np.all(C[-1] < C[0])
    # decays overall: each curve drops across every tenth of the window
    tenths = C[:: len(C) // 10]
    assert np.all(np.diff(tenths, axis=0) < 0)


def test_decay_rate_starts_at_zero(tmp_path):
    table = run_csv(tmp_path, "decay-rate", "--preset", "fig5")
    assert table.data[0, 1:] == pytest.approx(np.zeros(4), abs=1e-12)
    assert table.meta["singular_samples"].isdigit()


def test_markovian_decay_rate_settles(tmp_path):
    table = run_csv(tmp_path, "decay-rate", "--lambda-ratio", "3", "--beta", "0",
                    "--t-max", "40", "--dt", "0.5")
    assert table.data[-1, 1] == pytest.approx(3 - math.sqrt(6), rel=1e-9)
    assert np.all(table.data[1:, 1] > 0)


def test_lamb_shift_and_amplitude(tmp_path):
    shift = run_csv(tmp_path, "lamb-shift", "--lambda-ratio", "0.1", "--beta", "0,1e-9",
                    "--t-max", "2", "--dt", "0.5", name="s.csv")
    assert shift.data[:, 1] == pytest.approx(np.zeros(5), abs=1e-6)
    amp = run_csv(tmp_path, "amplitude", "--lambda-ratio", "0.1", "--beta", "0",
                  "--t-max", "2", "--dt", "0.5", name="a.csv")
    assert amp.columns == ["gt", "ReA@beta=0", "ImA@beta=0", "absA@beta=0"]
    assert amp.data[0, 1] == 1.0


def test_several_widths_label_columns(tmp_path):
    table = run_csv(tmp_path, "coherence", "--lambda-ratio", "0.1,3", "--beta", "0",
                    "--t-max", "1", "--dt", "0.5")
    assert table.columns[1:] == ["C@lambda_ratio=0.1;beta=0", "C@lambda_ratio=3;beta=0"]


def test_coincident_roots_use_volterra(tmp_path):
    table = run_csv(tmp_path, "decay-rate", "--lambda-ratio", "1", "--beta", "0",
                    "--t-max", "4", "--dt", "1")
    t = table.data[:, 0]
    # critically damped: A = exp(-t/2)(1 + t/2), so Gamma = t/(2 + t)
    assert table.data[:, 1] == pytest.approx(t / (2 + t), abs=1e-6)
    assert "volterra@beta=0" in table.meta


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "p.txt"
    cfg.write_text("lambda_width = 99.9\nbeta = 1e-9\n")
    table = run_csv(tmp_path, "coherence", "--config", str(cfg), "--t-max", "1", "--dt", "0.5")
    assert table.meta["lambda_ratio"] == repr(99.9 / 33.3)
    assert table.meta["beta"] == "1e-09"
    table = run_csv(tmp_path, "coherence", "--config", str(cfg), "--preset", "fig4a",
                    "--beta", "0", "--t-max", "1", name="b.csv")
    assert table.meta["lambda_ratio"] == "0.01" and table.columns == ["gt", "C@beta=0"]


def test_nonmarkov_beta_sweep(tmp_path):
    table = run_csv(tmp_path, "nonmarkov", "--lambda-ratio", "0.01", "--beta", "0,1e-9")
    assert table.columns == ["beta", "N", "N_max", "theta_opt", "horizon"]
    assert table.data[0, 1] == pytest.approx(1.13584773287, abs=1e-6)
    assert np.all(table.data[:, 2] >= table.data[:, 1])


def test_nonmarkov_lambda_sweep_json(tmp_path):
    out = tmp_path / "n.json"
    assert main(["nonmarkov", "--lambda-ratio", "0.5,0.6", "--beta", "0,1e-10",
                 "--no-maximize", "--format", "json", "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["grid"]["x"] == "lambda_ratio"
    assert [s["name"] for s in doc["series"]] == ["beta", "N", "N_max"]
    assert "threshold_1e-3" in doc["meta"]


def test_stdout_output(capsys):
    assert main(["amplitude", "--t-max", "1", "--dt", "1"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("# qmotion")


@pytest.mark.parametrize("args", [
    ["coherence", "--beta", ""],
    ["coherence", "--beta", "2e-3"],
    ["coherence", "--beta", "fast"],
    ["coherence", "--lambda-ratio", "0"],
    ["coherence", "--dt", "-1"],
    ["coherence", "--t-max", "1e9", "--dt", "1e-3"],
    ["coherence", "--bogus"],
    ["coherence", "--preset", "fig2a"],
    ["coherence", "--plot"],
    ["nonmarkov", "--theta", "3"],
    ["validate", "--checks", "nonsense"],
    [],
])
def test_configuration_errors(args):
    assert main(args) == EXIT_CONFIG


def test_io_errors(tmp_path):
    assert main(["coherence", "--out", str(tmp_path / "missing" / "x.csv")]) == EXIT_IO
    assert main(["coherence", "--config", str(tmp_path / "nope.txt")]) == EXIT_IO
    assert main(["plot", str(tmp_path / "nope.csv")]) == EXIT_IO


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "p.txt"
    cfg.write_text("colour = blue\n")
    assert main(["coherence", "--config", str(cfg)]) == EXIT_CONFIG


def test_numerical_failure_exit_code():
    # coincident roots and a grid too long for the Volterra fallback
    assert main(["coherence", "--lambda-ratio", "1", "--beta", "0",
                 "--t-max", "400", "--dt", "1e-4"]) == EXIT_NUMERIC


def test_plot_command(tmp_path):
    csv = tmp_path / "c.csv"
    assert main(["coherence", "--preset", "fig4a", "--out", str(csv)]) == EXIT_OK
    assert main(["plot", str(csv)]) == EXIT_OK
    svg = csv.with_suffix(".svg").read_text()
    assert polylines(svg) == 3
    target = tmp_path / "again.svg"
    assert main(["plot", str(csv), "--out", str(target)]) == EXIT_OK
    assert target.read_text() == svg
    empty = tmp_path / "e.csv"
    empty.write_text("# command: coherence\ngt,C\n")
    assert main(["plot", str(empty)]) == EXIT_CONFIG
    assert main(["plot", str(csv), str(csv), "--out", str(target)]) == EXIT_CONFIG
    outdir = tmp_path / "svgs"
    outdir.mkdir()
    assert main(["plot", str(csv), "--out", str(outdir), "--log"]) == EXIT_OK
    assert "log10" in (outdir / "c.svg").read_text()


def test_decay_rate_plot_has_gaps(tmp_path):
    csv = tmp_path / "g.csv"
    csv.write_text("# ylabel: Gamma/gamma\ngt,Gamma@beta=0\n0,0\n1,1\n2,nan\n3,2\n4,1\n")
    assert main(["plot", str(csv)]) == EXIT_OK
    assert polylines(csv.with_suffix(".svg").read_text()) == 2


# ------------------------------------------------------------ validate


def test_empty_validation_passes(capsys):
    assert main(["validate", "--checks", ""]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["passed"] is True


def test_fast_checks_pass(tmp_path):
    out = tmp_path / "v.json"
    assert main(["validate", "--checks", "closed-form,kernel", "--out", str(out)]) == EXIT_OK
    report = json.loads(out.read_text())
    assert [c["name"] for c in report["comparisons"]] == ["closed-form", "kernel"]
    assert all(c["max_error"] < c["tolerance"] for c in report["comparisons"])


def test_coarse_volterra_step_fails(capsys):
    assert main(["validate", "--checks", "volterra", "--dt", "1e-2"]) == EXIT_NUMERIC
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] is False
    assert report["comparisons"][0]["max_error"] > 1e-5


def test_too_coarse_volterra_step_is_reported():
    report = run_validation(["volterra"], dt=0.05)
    assert report["passed"] is False and "error" in report["comparisons"][0]


@pytest.mark.slow
def test_default_validation_passes(capsys):
    assert main(["validate"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert {c["name"] for c in report["comparisons"]} == {
        "closed-form", "volterra", "discrete-mode", "kernel"}
