"""Config parsing/validation, scan persistence, and the command-line front end."""

import json
import os

import numpy as np
import pytest

from landau_ee.cli import main
from landau_ee.config import config_echo, echo_to_text, load_config
from landau_ee.errors import ConfigError
from landau_ee.study import cmd_scan, compute_fits, csv_columns, run_scan

TINY_SCAN = """
[scan]
l_min = 3.0
l_max = 4.0
count = 2
alphas = 1.0

[run]
plots = false
"""


def write_config(tmp_path, text, name="study.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


# ---------------------------------------------------------------------------
# config parsing and validation


def test_defaults_load():
    cfg = load_config(text="")
    assert cfg.b0 == 1.0
    assert cfg.l_grid == (3.0, 4.0, 5.0, 6.0, 7.0, 8.0)
    assert cfg.alphas == (0.5, 1.0, 2.0)
    assert cfg.interval == (0.5, 2.0)
    assert cfg.p_values == (1.0,)
    assert cfg.truncation_mode == "auto" and cfg.levels == 4
    assert cfg.jobs == 1 and cfg.out == "out" and cfg.plots is True
    assert cfg.field_family.amplitude == 0.0
    assert cfg.potential_family.amplitude == 0.0
    assert cfg.region.shape == "disk" and cfg.region.radius == 1.0


def test_unknown_section_and_key_rejected():
    with pytest.raises(ConfigError, match="unknown config section"):
        load_config(text="[regions]\nshape = disk\n")
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(text="[model]\nb0 = 1.0\nb1 = 2.0\n")
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(text="[run]\nthreads = 4\n")


def test_malformed_and_missing_files(tmp_path):
    with pytest.raises(ConfigError, match="malformed"):
        load_config(text="[model\nb0 = 1.0\n")
    with pytest.raises(ConfigError, match="not found"):
        load_config(path=str(tmp_path / "nope.ini"))


def test_model_and_tameness_validation():
    with pytest.raises(ConfigError, match="b0 must be positive"):
        load_config(text="[model]\nb0 = -1.0\n")
    with pytest.raises(ConfigError, match="tameness"):
        load_config(text="[tameness]\ngamma = 2.0\neps = 1.2\n")
    with pytest.raises(ConfigError, match="tameness"):
        load_config(text="[tameness]\ngamma = -1.0\neps = 0.5\n")


def test_interval_endpoint_near_landau_level_rejected():
    # a = 1.0 is exactly the lowest level of H0 at b0 = 1
    with pytest.raises(ConfigError, match="avoid the spectrum"):
        load_config(text="[scan]\ninterval = 1.0, 2.0\n")
    # within the default gap tolerance of the second level
    with pytest.raises(ConfigError, match="avoid the spectrum"):
        load_config(text="[scan]\ninterval = 0.5, 3.000000001\n")
    # widening the tolerance pulls more endpoints into the rejection zone
    with pytest.raises(ConfigError, match="avoid the spectrum"):
        load_config(
            text="[scan]\ninterval = 0.5, 2.9\n[tolerances]\nendpoint_gap = 0.2\n"
        )
    cfg = load_config(text="[scan]\ninterval = 0.5, 2.9\n")
    assert cfg.interval == (0.5, 2.9)
    with pytest.raises(ConfigError, match="a < b"):
        load_config(text="[scan]\ninterval = 2.0, 0.5\n")


def test_family_kind_key_enforcement():
    with pytest.raises(ConfigError, match="do not apply"):
        load_config(text="[field]\nkind = zero\namplitude = 0.3\n")
    with pytest.raises(ConfigError, match="missing required key"):
        load_config(text="[field]\nkind = gaussian\nwidth = 1.0\n")
    with pytest.raises(ConfigError, match="do not apply"):
        load_config(text="[potential]\nkind = power_law\nwidth = 1.0\n")
    with pytest.raises(ConfigError, match="unknown family"):
        load_config(text="[field]\nkind = solenoid\n")
    # decay-rate violations surface as config errors with the section named
    with pytest.raises(ConfigError, match=r"\[field\].*decay"):
        load_config(
            text="[field]\nkind = power_law\namplitude = 0.2\nexponent = 0.5\n"
        )
    cfg = load_config(
        text="[field]\nkind = gaussian\namplitude = 0.3\nwidth = 1.0\n"
             "center = 0.5, -0.25\n"
    )
    assert cfg.field_family.amplitude == 0.3


def test_region_key_enforcement():
    with pytest.raises(ConfigError, match="side does not apply"):
        load_config(text="[region]\nshape = disk\nradius = 1.0\nside = 2.0\n")
    with pytest.raises(ConfigError, match="radius does not apply"):
        load_config(text="[region]\nshape = square\nradius = 1.0\nside = 2.0\n")
    with pytest.raises(ConfigError, match="unknown shape"):
        load_config(text="[region]\nshape = hexagon\n")
    cfg = load_config(text="[region]\nshape = square\nside = 2.5\n")
    assert cfg.region.shape == "square" and cfg.region.side == 2.5


def test_scan_grid_construction():
    cfg = load_config(text="[scan]\nl_min = 1.0\nl_max = 4.0\ncount = 3\nspacing = log\n")
    assert np.allclose(cfg.l_grid, (1.0, 2.0, 4.0))
    cfg = load_config(text="[scan]\nl_min = 5.0\nl_max = 9.0\ncount = 1\n")
    assert cfg.l_grid == (5.0,)
    with pytest.raises(ConfigError, match="l_min < l_max"):
        load_config(text="[scan]\nl_min = 4.0\nl_max = 3.0\ncount = 2\n")
    with pytest.raises(ConfigError, match="count"):
        load_config(text="[scan]\ncount = 0\n")
    with pytest.raises(ConfigError, match="spacing"):
        load_config(text="[scan]\nspacing = geometric\n")
    with pytest.raises(ConfigError, match="log spacing"):
        load_config(text="[scan]\nl_min = 0.0\nl_max = 4.0\nspacing = log\n")
    with pytest.raises(ConfigError, match="alphas"):
        load_config(text="[scan]\nalphas = 1.0, -2.0\n")
    with pytest.raises(ConfigError, match="p_values"):
        load_config(text="[scan]\np_values = 0.0\n")


def test_truncation_mode_rules():
    cfg = load_config(text="[truncation]\nmode = explicit\nlevels = 3\nm_max = 25\n")
    assert cfg.truncation_mode == "explicit" and cfg.m_max == 25
    with pytest.raises(ConfigError, match="m_max"):
        load_config(text="[truncation]\nmode = explicit\nlevels = 3\n")
    with pytest.raises(ConfigError, match="only to mode=explicit"):
        load_config(text="[truncation]\nmode = auto\nm_max = 25\n")
    with pytest.raises(ConfigError, match="mode"):
        load_config(text="[truncation]\nmode = adaptive\n")
    with pytest.raises(ConfigError, match="levels"):
        load_config(text="[truncation]\nlevels = 0\n")


def test_run_section_validation():
    with pytest.raises(ConfigError, match="jobs"):
        load_config(text="[run]\njobs = 0\n")
    with pytest.raises(ConfigError, match="fit_window"):
        load_config(text="[run]\nfit_window = 2\n")
    with pytest.raises(ConfigError, match="plots"):
        load_config(text="[run]\nplots = maybe\n")
    with pytest.raises(ConfigError, match="schatten_trials"):
        load_config(text="[run]\nschatten_trials = 0\n")
    with pytest.raises(ConfigError, match="quadrature"):
        load_config(text="[quadrature]\nn_radial = -5\n")


def test_kernels_point_list():
    cfg = load_config(text="")
    assert cfg.kernels_points == ((0.1, 0.2), (1.0, 0.0), (-0.7, 2.1))
    cfg = load_config(
        text="[kernels]\npoints = 0.3,0.4 | -1.0,2.0  ; audit pair\n"
    )
    assert cfg.kernels_points == ((0.3, 0.4), (-1.0, 2.0))
    with pytest.raises(ConfigError, match="x,y pair"):
        load_config(text="[kernels]\npoints = 0.3,0.4,0.5\n")


def test_inline_comments_and_overrides():
    cfg = load_config(
        text="[model]\nb0 = 2.0  ; field strength\n[run]\nseed = 7 # rng\n"
             "[scan]\ninterval = 1.0, 3.0\n",
        overrides={("run", "out"): "elsewhere", ("run", "jobs"): 3},
    )
    assert cfg.b0 == 2.0 and cfg.seed == 7
    assert cfg.out == "elsewhere" and cfg.jobs == 3


def test_config_echo_closure():
    text = """
[model]
b0 = 1.5

[field]
kind = gaussian
amplitude = 0.2
width = 1.0

[region]
shape = square
side = 2.5

[scan]
l_min = 1.0
l_max = 4.0
count = 3
spacing = log
alphas = 0.5, 1.0
p_values = 1.0, 2.0
interval = 1.0, 5.0

[run]
plots = false
"""
    cfg = load_config(text=text)
    echo = config_echo(cfg)
    rebuilt = load_config(text=echo_to_text(echo))
    assert rebuilt.b0 == cfg.b0
    assert rebuilt.l_grid == cfg.l_grid
    assert rebuilt.alphas == cfg.alphas
    assert rebuilt.p_values == cfg.p_values
    assert rebuilt.interval == cfg.interval
    assert rebuilt.region == cfg.region
    assert rebuilt.field_family.amplitude == cfg.field_family.amplitude
    assert config_echo(rebuilt) == echo


# ---------------------------------------------------------------------------
# scan persistence


def test_csv_columns_and_zero_perturbation_rows(tmp_path):
    cfg = load_config(text=TINY_SCAN)
    assert csv_columns(cfg.p_values) == [
        "L", "alpha", "S_unpert", "S_pert", "cross_p1.0", "diff_p1.0",
    ]
    table, written = cmd_scan(cfg, out_dir=str(tmp_path))
    lines = (tmp_path / "table.csv").read_text().splitlines()
    assert lines[0] == "L,alpha,S_unpert,S_pert,cross_p1.0,diff_p1.0"
    assert len(lines) == 1 + 2  # two scales, one alpha
    for line in lines[1:]:
        cells = line.split(",")
        # zero perturbation: perturbed column is bitwise the unperturbed one
        assert cells[2] == cells[3]
        assert cells[5] == repr(0.0)
    assert {os.path.basename(p) for p in written} == {
        "table.csv", "scan.json", "run_meta.json",
    }


def test_scan_outputs_deterministic(tmp_path):
    text = TINY_SCAN + "\n[field]\nkind = gaussian\namplitude = 0.2\nwidth = 1.0\n"
    cfg = load_config(text=text)
    cmd_scan(cfg, out_dir=str(tmp_path / "a"))
    cmd_scan(cfg, out_dir=str(tmp_path / "b"))
    for name in ("table.csv", "scan.json"):
        assert (tmp_path / "a" / name).read_bytes() == (
            tmp_path / "b" / name
        ).read_bytes()
    # run_meta carries the wall clock and is allowed to differ
    meta = json.loads((tmp_path / "a" / "run_meta.json").read_text())
    assert meta["rows"] == 2 and meta["jobs"] == 1
    assert meta["wall_clock_seconds"] > 0


def test_scan_json_document(tmp_path):
    cfg = load_config(text=TINY_SCAN)
    cmd_scan(cfg, out_dir=str(tmp_path))
    doc = json.loads((tmp_path / "scan.json").read_text())
    assert set(doc) == {"config", "fits", "table"}
    assert doc["config"]["scan"]["count"] == "2"
    assert doc["fits"] is None  # two scales cannot support a 3-point fit
    assert len(doc["table"]) == 2
    row = doc["table"][0]
    assert set(row) == {"L", "alpha", "S_unpert", "S_pert", "cross", "diff"}
    assert row["L"] == 3.0 and row["diff"]["1.0"] == 0.0


def test_fits_present_for_three_scales():
    cfg = load_config(
        text="[scan]\nl_min = 3.0\nl_max = 5.0\ncount = 3\nalphas = 1.0\n"
    )
    table = run_scan(cfg)
    fits = compute_fits(table, cfg.fit_window)
    entry = fits["slopes"]["S_unpert_alpha1.0"]
    assert set(entry) == {"slope", "intercept", "r_squared"}
    assert entry["slope"] > 0 and entry["r_squared"] > 0.99
    assert fits["exponents"]["same_p1.0"] > 0
    # zero perturbation: the difference norm is identically zero, no exponent
    assert fits["exponents"]["difference_p1.0"] is None


def test_plot_files_are_svg(tmp_path):
    cfg = load_config(
        text="[scan]\nl_min = 3.0\nl_max = 5.0\ncount = 3\nalphas = 1.0\n"
    )
    _, written = cmd_scan(cfg, out_dir=str(tmp_path))
    names = {os.path.basename(p) for p in written}
    assert {"entropy_vs_L.svg", "norms_loglog.svg"} <= names
    for name in ("entropy_vs_L.svg", "norms_loglog.svg"):
        head = (tmp_path / name).read_text()[:300]
        assert "<?xml" in head and "svg" in head


# ---------------------------------------------------------------------------
# command-line front end


def test_cli_config_errors_exit_2(tmp_path, capsys):
    bad = write_config(tmp_path, "[model]\nb0 = 1.0\nb1 = 2.0\n")
    assert main(["scan", "--config", bad]) == 2
    assert "config error" in capsys.readouterr().err
    assert main(["scan", "--config", str(tmp_path / "missing.ini")]) == 2


def test_cli_scan_and_output_precedence(tmp_path, monkeypatch, capsys):
    path = write_config(tmp_path, TINY_SCAN)
    env_dir = tmp_path / "env_out"
    cli_dir = tmp_path / "cli_out"
    monkeypatch.setenv("LANDAU_EE_OUT", str(env_dir))
    monkeypatch.setenv("LANDAU_EE_JOBS", "2")

    assert main(["scan", "--config", path, "--out", str(cli_dir)]) == 0
    out = capsys.readouterr().out
    assert "scan complete: 2 rows over 2 scales" in out
    assert (cli_dir / "table.csv").exists()
    assert not env_dir.exists()  # the flag outranks the environment
    meta = json.loads((cli_dir / "run_meta.json").read_text())
    assert meta["jobs"] == 2  # environment outranks the config default

    assert main(["scan", "--config", path, "--jobs", "1"]) == 0
    capsys.readouterr()
    assert (env_dir / "table.csv").exists()
    meta = json.loads((env_dir / "run_meta.json").read_text())
    assert meta["jobs"] == 1

    monkeypatch.setenv("LANDAU_EE_JOBS", "two")
    assert main(["scan", "--config", path]) == 2


def test_cli_parallel_scan_matches_serial(tmp_path, monkeypatch, capsys):
    path = write_config(tmp_path, TINY_SCAN)
    monkeypatch.delenv("LANDAU_EE_OUT", raising=False)
    monkeypatch.delenv("LANDAU_EE_JOBS", raising=False)
    a, b = str(tmp_path / "serial"), str(tmp_path / "par")
    assert main(["scan", "--config", path, "--out", a, "--jobs", "1"]) == 0
    assert main(["scan", "--config", path, "--out", b, "--jobs", "2"]) == 0
    capsys.readouterr()
    assert (tmp_path / "serial" / "table.csv").read_bytes() == (
        tmp_path / "par" / "table.csv"
    ).read_bytes()


def test_cli_runtime_failure_exits_1(tmp_path, capsys):
    # coarse grid override + perturbation: assembly health check must trip
    text = TINY_SCAN + (
        "\n[field]\nkind = gaussian\namplitude = 0.3\nwidth = 1.0\n"
        "\n[quadrature]\nn_radial = 10\nn_angular = 8\nr_max = 8.0\n"
    )
    path = write_config(tmp_path, text)
    assert main(["scan", "--config", path, "--out", str(tmp_path / "o")]) == 1
    assert "error" in capsys.readouterr().err


def test_cli_kernels(tmp_path, capsys):
    path = write_config(tmp_path, "[kernels]\nlevel = 1\npoints = 0.3,0.4\n")
    assert main(["kernels", "--config", path]) == 0
    out = capsys.readouterr().out
    assert "p_1(x,x)" in out
    assert "PASS kernels" in out


def test_cli_verify(tmp_path, capsys):
    path = write_config(tmp_path, "[run]\nschatten_trials = 40\n")
    assert main(["verify", "--config", path]) == 0
    out = capsys.readouterr().out
    assert "10/10 suites passed" in out
    assert out.count("PASS") == 10 and "FAIL" not in out
