import json

import numpy as np
import pytest

from stereoquant.cli import EXIT_CONFIG, EXIT_GEOMETRY, EXIT_OK, EXIT_RESOURCE, main
from stereoquant.config import (
    RunConfig,
    load_config,
    parse_density,
    parse_length,
    parse_point,
)
from stereoquant.errors import ConfigError


@pytest.mark.parametrize("text,value", [("15mm", 0.015), ("20um", 20e-6), ("20 µm", 20e-6),
                                        ("100", 100.0), ("0.1 km", 100.0), ("3.5cm", 0.035),
                                        ("1e-3m", 1e-3)])
def test_parse_length(text, value):
    assert parse_length(text) == pytest.approx(value, rel=1e-12)


@pytest.mark.parametrize("bad", ["", "abc", "5 parsecs", "mm"])
def test_parse_length_rejects(bad):
    with pytest.raises(ConfigError):
        parse_length(bad)


@pytest.mark.parametrize("text,spacing", [("3/cm", 0.01 / 3), ("3 pts/cm", 0.01 / 3),
                                          ("300/m", 0.01 / 3), ("1", 0.01), ("0.1/mm", 0.01)])
def test_parse_density(text, spacing):
    assert parse_density(text) == pytest.approx(spacing, rel=1e-12)


def test_parse_density_rejects():
    with pytest.raises(ConfigError):
        parse_density("0/cm")
    with pytest.raises(ConfigError):
        parse_density("many")


def test_parse_point():
    assert parse_point("0, 50cm, 100") == (0.0, 0.5, 100.0)
    with pytest.raises(ConfigError):
        parse_point("1, 2")


def test_defaults():
    cfg = RunConfig().validate()
    assert (cfg.rig.baseline, cfg.rig.focal_length, cfg.rig.pixel_size, cfg.rig.pixel_count) == (
        100.0, 15e-3, 20e-6, 2048)
    assert cfg.target == (0.0, 0.0, 100.0)
    assert cfg.spacing == pytest.approx(0.01 / 3)


FULL = """
[rig]
baseline = 50 m
focal_length = 12mm
pixel_size = 10um
pixel_count = 1024

[target]
position = 1, 2, 90

[grid]
density = 2/cm
margin = 1.5

[sweep]
parameter = focal
values = 10mm, 15mm, 20mm

[plane]
plane = xz
center = 0, 0, 120
extent = 40
step = 10

[converge]
baselines = 10, 20
densities = 0.5/cm, 1/cm

[output]
dir = results
threads = 2
seed = 9
jitter = yes
"""


def test_load_full_config():
    cfg = load_config(text=FULL)
    assert cfg.rig.baseline == 50 and cfg.rig.focal_length == pytest.approx(0.012)
    assert cfg.rig.pixel_size == pytest.approx(1e-5) and cfg.rig.pixel_count == 1024
    assert cfg.target == (1.0, 2.0, 90.0)
    assert cfg.spacing == pytest.approx(0.005) and cfg.margin == 1.5
    assert cfg.sweep.parameter == "focal"
    assert cfg.sweep.values == pytest.approx([0.01, 0.015, 0.02])
    assert cfg.plane.plane == "XZ" and cfg.plane.center == (0, 0, 120)
    assert cfg.converge.densities == pytest.approx([0.5, 1.0])
    assert str(cfg.out_dir) == "results" and cfg.threads == 2 and cfg.seed == 9 and cfg.jitter


@pytest.mark.parametrize("text", [
    "[rig]\nbaseline = -5\n",
    "[rig]\npixel_count = 1023\n",
    "[grid]\nspacing = 1mm\ndensity = 3/cm\n",
    "[sweep]\nparameter = colour\n",
    "[plane]\nplane = AB\n",
    "[rig]\nfocal_length = fifteen\n",
    "no section header\n",
])
def test_bad_configs(text):
    with pytest.raises(ConfigError):
        load_config(text=text)


# ---------------------------------------------------------------- CLI

def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_sweep(tmp_path, capsys):
    code, out, _ = run(capsys, "sweep", "--parameter", "baseline", "--values", "25,50,100",
                       "--spacing", "1/cm", "--out", str(tmp_path))
    assert code == EXIT_OK
    text = (tmp_path / "sweep_baseline.csv").read_text()
    assert len(text.splitlines()) == 5
    assert "R^2" in out


def test_cli_config_override(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[grid]\ndensity = 0.5/cm\n[sweep]\nparameter = pixel\nvalues = 20um\n")
    code, _, _ = run(capsys, "sweep", "--config", str(cfg), "--spacing", "1/cm",
                     "--out", str(tmp_path))
    assert code == EXIT_OK
    rows = (tmp_path / "sweep_pixel.csv").read_text().splitlines()
    # 1/cm from the flag wins over 0.5/cm from the file: >2000 points
    assert int(rows[2].split(",")[7]) > 2000


def test_cli_config_errors(tmp_path, capsys):
    assert run(capsys, "sweep", "--config", str(tmp_path / "missing.ini"))[0] == EXIT_CONFIG
    bad = tmp_path / "bad.ini"
    bad.write_text("[rig]\nbaseline = -1\n")
    assert run(capsys, "plane", "--config", str(bad))[0] == EXIT_CONFIG
    assert run(capsys, "sweep", "--margin", "-2")[0] == EXIT_CONFIG
    assert run(capsys, "sweep", "--parameter", "focal", "--values", "0mm")[0] == EXIT_CONFIG


def test_cli_geometry_error(tmp_path, capsys):
    code, _, err = run(capsys, "sweep", "--parameter", "distance", "--values", "-50",
                       "--out", str(tmp_path))
    assert code in (EXIT_CONFIG, EXIT_GEOMETRY)
    cfg = tmp_path / "t.ini"
    cfg.write_text("[target]\nposition = 0, 0, -100\n")
    code, _, err = run(capsys, "build", "--config", str(cfg), "--table", str(tmp_path / "t.sqlt"))
    assert code == EXIT_GEOMETRY
    assert "TargetNotVisible" in err


def test_cli_resource_cap(tmp_path, capsys):
    cfg = tmp_path / "cap.ini"
    cfg.write_text("[grid]\ndensity = 3/cm\nmax_points = 1000\n")
    code, _, err = run(capsys, "build", "--config", str(cfg), "--table", str(tmp_path / "t.sqlt"))
    assert code == EXIT_RESOURCE
    assert "resource" in err


def test_cli_build_and_query(tmp_path, capsys):
    table = tmp_path / "t.sqlt"
    code, out, _ = run(capsys, "build", "--spacing", "1/cm", "--table", str(table))
    assert code == EXIT_OK and table.exists()
    code, out, _ = run(capsys, "query", "--table", str(table), "--point", "0", "0", "100",
                       "--export", str(tmp_path / "v.csv"))
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["pixels"] == [[1399, 1024], [649, 1024]]
    assert rep["points"] > 2000
    assert len((tmp_path / "v.csv").read_text().splitlines()) == rep["points"] + 1
    code, out, _ = run(capsys, "query", "--table", str(table), "--pixels", "1399", "1024", "649", "1024")
    assert code == EXIT_OK and json.loads(out)["points"] == rep["points"]
    # an impossible match
    code, _, err = run(capsys, "query", "--table", str(table), "--pixels", "0", "0", "2047", "2047")
    assert code == EXIT_GEOMETRY and "NotFound" in err


def test_cli_query_corrupt_file(tmp_path, capsys):
    bad = tmp_path / "bad.sqlt"
    bad.write_bytes(b"SQLT\x01\x00\x02\x00garbage")
    code, _, err = run(capsys, "query", "--table", str(bad), "--point", "0", "0", "100")
    assert code == EXIT_GEOMETRY and "CorruptFile" in err


def test_cli_compare(tmp_path, capsys):
    a = tmp_path / "a.csv"
    a.write_text("value,cuboid_vol_m3\n5,0.1\n10,0.05\n")
    b = tmp_path / "b.csv"
    b.write_text("value,cuboid_vol_m3\n5,0.1\n10,0.05\n")
    code, out, _ = run(capsys, "compare", str(a), str(b))
    assert code == EXIT_OK
    assert json.loads(out) == {"n": 2, "rmse_m3": 0.0, "msa_percent": 0.0}


def test_cli_plane_and_converge(tmp_path, capsys):
    cfg = tmp_path / "p.ini"
    cfg.write_text("[grid]\ndensity = 0.5/cm\n[plane]\nextent = 100\nstep = 100\n"
                   "[converge]\nbaselines = 100\ndensities = 0.25/cm, 0.5/cm\n")
    code, out, _ = run(capsys, "plane", "--config", str(cfg), "--out", str(tmp_path))
    assert code == EXIT_OK
    lines = (tmp_path / "plane_XY.csv").read_text().splitlines()
    assert len(lines) == 2 + 9
    vals = np.array([[float(x) for x in l.split(",")] for l in lines[2:]])
    assert np.isnan(vals[0, 3]) and np.isfinite(vals[4, 3])  # corner out of view, centre fine
    code, _, _ = run(capsys, "converge", "--config", str(cfg), "--out", str(tmp_path))
    assert code == EXIT_OK
    assert len((tmp_path / "converge.csv").read_text().splitlines()) == 4


def test_cli_deterministic_output(tmp_path, capsys):
    for d in ("a", "b"):
        assert run(capsys, "sweep", "--values", "50,100", "--spacing", "1/cm",
                   "--jitter", "--seed", "3", "--out", str(tmp_path / d))[0] == EXIT_OK
    assert (tmp_path / "a" / "sweep_baseline.csv").read_bytes() == \
        (tmp_path / "b" / "sweep_baseline.csv").read_bytes()
