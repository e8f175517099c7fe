"""Command-line interface: config parsing, file formats, exit codes."""

import csv
import math
import os

import numpy as np
import pytest

from kinb import GridSpec, InitialDatum, init_state
from kinb.cli import load_config, main, read_snapshot, write_manifest, write_snapshot
from kinb.errors import ConfigError

KAC_INI = """\
[grid]
dimension = 1
mode = full-1d
n = 129
eta_max = 12.0

[kernel]
nu = 0.25

[quad]
theta_min = 5e-3

[time]
dt = 2e-3
t_end = 0.01
snapshots = 2

[init]
kind = laplace
params = a=1.0

[induction]
part = I
"""


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_load_config_defaults_and_manifest_roundtrip(tmp_path):
    path = _write(tmp_path, "kac.ini", KAC_INI)
    cfg = load_config(path)
    assert cfg["grid"]["n"] == 129
    assert cfg["kernel"]["kappa"] == 1.0  # default filled in
    assert cfg["quad"]["panels"] == 8
    out = str(tmp_path / "manifest.ini")
    write_manifest(cfg, out)
    assert load_config(out) == cfg


def test_load_config_rejects_unknown_and_missing(tmp_path):
    bad1 = _write(tmp_path, "a.ini", KAC_INI + "\n[extra]\nx = 1\n")
    with pytest.raises(ConfigError):
        load_config(bad1)
    bad2 = _write(tmp_path, "b.ini", KAC_INI.replace("nu = 0.25", "nu = 0.25\nxx = 3"))
    with pytest.raises(ConfigError):
        load_config(bad2)
    bad3 = _write(tmp_path, "c.ini", KAC_INI.replace("nu = 0.25", ""))
    with pytest.raises(ConfigError, match="nu"):
        load_config(bad3)
    bad4 = _write(tmp_path, "d.ini", KAC_INI.replace("n = 129", "n = many"))
    with pytest.raises(ConfigError):
        load_config(bad4)


def test_simulate_writes_run_and_snapshots(tmp_path, capsys):
    cfg = _write(tmp_path, "kac.ini", KAC_INI)
    out = str(tmp_path / "run")
    assert main(["simulate", cfg, "--out", out]) == 0
    capsys.readouterr()
    with open(os.path.join(out, "run.csv")) as fh:
        rows = list(csv.DictReader(fh))
    ts = [float(r["t"]) for r in rows]
    ms = [float(r["mass"]) for r in rows]
    assert ts == sorted(ts) and ts[0] == 0.0 and ts[-1] == 0.01
    assert max(abs(m - ms[0]) for m in ms) < 1e-12
    snaps = sorted(f for f in os.listdir(out) if f.startswith("snapshot_"))
    assert len(snaps) == 2
    st = read_snapshot(os.path.join(out, snaps[-1]))
    assert st.t == 0.01
    assert os.path.exists(os.path.join(out, "manifest.ini"))


def test_simulate_rejects_unstable_dt(tmp_path, capsys):
    cfg = _write(tmp_path, "kac.ini", KAC_INI.replace("dt = 2e-3", "dt = 10.0")
                 .replace("t_end = 0.01", "t_end = 20.0"))
    assert main(["simulate", cfg, "--out", str(tmp_path / "x")]) == 2
    assert "numerical failure" in capsys.readouterr().err


def test_snapshot_roundtrip(tmp_path):
    g = GridSpec(dimension=2, mode="full-2d", n=16, eta_max=2.0)
    st = init_state(g, InitialDatum(kind="gaussian", dimension=2, sigma=0.5,
                                    center=(0.2, -0.1)))
    p = str(tmp_path / "snap.csv")
    write_snapshot(st, p)
    back = read_snapshot(p)
    assert back.grid == g
    assert back.t == st.t
    assert np.array_equal(back.values, st.values)


def test_verify_exit_codes(capsys):
    assert main(["verify", "epsilon", "--n", "200"]) == 0
    capsys.readouterr()
    # argparse rejects the unknown choice; main maps that to exit 1
    assert main(["verify", "nosuchsuite"]) == 1
    capsys.readouterr()


def test_verify_detects_broken_constant(monkeypatch, capsys):
    import kinb.inequalities as ineq
    monkeypatch.setattr(ineq, "_CM_SCALE", 1e-3)
    assert main(["verify", "kl", "--n", "50"]) == 3
    out = capsys.readouterr().out
    assert "counterexample" in out.lower()


def test_constants_prints_frozen_value(capsys):
    assert main(["constants", "--m", "2", "--d", "1", "--nu", "0.25"]) == 0
    out = capsys.readouterr().out
    assert "0.847997" in out


def test_diagnose_snapshot(tmp_path, capsys):
    g = GridSpec(dimension=1, mode="full-1d", n=257, eta_max=16.0)
    st = init_state(g, InitialDatum(kind="gaussian", dimension=1, sigma=1.0))
    p = str(tmp_path / "snap.csv")
    write_snapshot(st, p)
    assert main(["diagnose", p, "--fit-window", "0.5", "2.0",
                 "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "alpha_hat" in out
    with open(tmp_path / "fit.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    assert abs(float(rows[0]["alpha_hat"]) - 1.0) < 1e-9
    # window with no usable shells
    assert main(["diagnose", p, "--fit-window", "16.5", "17.0",
                 "--out", str(tmp_path)]) == 1


def test_induction_needs_room_for_scales(tmp_path, capsys):
    cfg = _write(tmp_path, "kac.ini", KAC_INI)
    out = str(tmp_path / "run")
    assert main(["simulate", cfg, "--out", out]) == 0
    capsys.readouterr()
    # eta_max = 12 puts the part-I base scale above eta_max/sqrt(2)
    assert main(["induction", out]) == 1
    assert "no scale fits" in capsys.readouterr().err


def test_induction_chain_end_to_end(tmp_path, capsys):
    ini = KAC_INI.replace("n = 129", "n = 161").replace(
        "eta_max = 12.0", "eta_max = 16.0").replace(
        "t_end = 0.01", "t_end = 0.2").replace(
        "snapshots = 2", "snapshots = 3")
    cfg = _write(tmp_path, "kac.ini", ini)
    out = str(tmp_path / "run")
    assert main(["simulate", cfg, "--out", out]) == 0
    capsys.readouterr()
    assert main(["induction", out, "--n-random", "16"]) == 0
    text = capsys.readouterr().out
    assert "largest passing scale" in text
    with open(os.path.join(out, "induction.csv")) as fh:
        rows = list(csv.DictReader(fh))
    assert rows
    scale0 = 4.0 / (math.sqrt(2) - 1)
    assert abs(float(rows[0]["scale"]) - scale0) < 1e-9
    assert all(r["cap_ok"] == "1" for r in rows)
