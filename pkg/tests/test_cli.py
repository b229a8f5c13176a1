import os

import numpy as np
import pytest

from partflow.cli import main
from partflow.config import RunConfig, parse_config_text


def test_config_parsing():
    cfg = RunConfig(parse_config_text(
        """
        # comment
        case = z1
        domain.Lx = 2.0
        solver.h = 0.05  # trailing comment
        """
    ))
    assert cfg.case == "z1"
    assert cfg.Lx == 2.0
    assert cfg.h == 0.05
    assert cfg.eps == 0.005  # defaults to h/10


def test_config_override_wins():
    cfg = RunConfig({"solver.h": "0.05"})
    cfg.override(["solver.h=0.1", "case=flat_source"])
    assert cfg.h == 0.1
    assert cfg.case == "flat_source"
    assert cfg.r == 1 / 20.0


def test_bad_config_line():
    with pytest.raises(ValueError):
        parse_config_text("not a key value pair")


def test_solve_writes_artifacts_and_reports_error(tmp_path, capsys):
    out = tmp_path / "run"
    rc = main([
        "solve", "--out", str(out),
        "--override", "solver.h=0.05",
        "--override", "solver.eps=0.005",
        "--override", "solver.ds=0.01",
        "--override", "output.nx=80",
        "--override", "output.ny=20",
    ])
    assert rc == 0
    text = capsys.readouterr().out
    assert "linf_relative_error" in text
    for name in ("u.csv", "particles.csv", "meta"):
        assert (out / name).exists()


def test_solve_meta_round_trip(tmp_path):
    out1 = tmp_path / "a"
    args = ["--override", "solver.h=0.05", "--override", "solver.eps=0.005",
            "--override", "solver.ds=0.01", "--override", "output.nx=60",
            "--override", "output.ny=16"]
    assert main(["solve", "--out", str(out1)] + args) == 0
    out2 = tmp_path / "b"
    assert main(["solve", "--out", str(out2), "--config", str(out1 / "meta")]) == 0
    u1 = (out1 / "u.csv").read_bytes()
    u2 = (out2 / "u.csv").read_bytes()
    assert u1 == u2


def test_solve_threshold_gate(tmp_path):
    rc = main([
        "solve", "--out", str(tmp_path / "x"),
        "--override", "solver.h=0.05", "--override", "solver.eps=0.005",
        "--override", "solver.ds=0.01", "--override", "output.nx=40",
        "--override", "output.ny=10", "--override", "solve.max_error=1e-9",
    ])
    assert rc == 1


def test_solve_failure_writes_error_record(tmp_path, capsys):
    out = tmp_path / "bad"
    rc = main([
        "solve", "--out", str(out),
        "--override", "case=nonsense",
    ])
    assert rc == 1
    assert (out / "error").exists()
    assert "error =" in (out / "error").read_text()


def test_sweep_writes_protocol_csv(tmp_path):
    out = tmp_path / "sweep"
    rc = main([
        "sweep", "--out", str(out), "--protocols", "c",
        "--override", "sweep.factors=0,1",
        "--override", "output.nx=60", "--override", "output.ny=16",
    ])
    assert rc == 0
    lines = (out / "sweep_c.csv").read_text().splitlines()
    assert lines[0] == "h,eps,ds,error,runtime,case"
    assert len(lines) == 3
    errs = [float(l.split(",")[3]) for l in lines[1:]]
    assert all(e >= 0 for e in errs)


def test_sweep_records_failures_and_continues(tmp_path):
    out = tmp_path / "sweepfail"
    # z2 at very large ds violates the weight positivity precondition
    rc = main([
        "sweep", "--out", str(out), "--protocols", "d",
        "--override", "case=z2",
        "--override", "sweep.factors=5,0",
        "--override", "output.nx=40", "--override", "output.ny=10",
    ])
    lines = (out / "sweep_d.csv").read_text().splitlines()
    assert len(lines) == 3
    assert "z2:failed" in lines[1]
    assert "z2:failed" not in lines[2]
    assert rc == 0  # at least one point succeeded


def test_sweep_parallel_matches_serial(tmp_path):
    common = ["--protocols", "c", "--override", "sweep.factors=0,1",
              "--override", "output.nx=40", "--override", "output.ny=10"]
    out1, out2 = tmp_path / "s1", tmp_path / "s2"
    assert main(["sweep", "--out", str(out1), "--threads", "1"] + common) == 0
    assert main(["sweep", "--out", str(out2), "--threads", "2"] + common) == 0
    a = (out1 / "sweep_c.csv").read_text().splitlines()
    b = (out2 / "sweep_c.csv").read_text().splitlines()
    # identical solves; runtime column may differ
    strip = lambda lines: [",".join(np.array(l.split(","))[[0, 1, 2, 3, 5]]) for l in lines[1:]]
    assert strip(a) == strip(b)


def test_landscape_cli_smoke(tmp_path, capsys):
    out = tmp_path / "land"
    rc = main([
        "landscape", "--out", str(out), "--seed", "3",
        "--override", "landscape.nx=40", "--override", "landscape.ny=20",
        "--override", "landscape.steps=3",
        "--override", "landscape.snapshot_every=3",
        "--override", "landscape.amplitude=3e-5",
    ])
    assert rc == 0
    assert "amplitude" in capsys.readouterr().out
    assert (out / "amplitude.csv").exists()
    assert (out / "step_3" / "z.csv").exists()


def test_landscape_deterministic_rerun(tmp_path):
    args = ["--seed", "5",
            "--override", "landscape.nx=40", "--override", "landscape.ny=20",
            "--override", "landscape.steps=2",
            "--override", "landscape.snapshot_every=2",
            "--override", "landscape.amplitude=2e-5"]
    out1, out2 = tmp_path / "l1", tmp_path / "l2"
    assert main(["landscape", "--out", str(out1)] + args) == 0
    assert main(["landscape", "--out", str(out2)] + args) == 0
    assert (out1 / "amplitude.csv").read_bytes() == (out2 / "amplitude.csv").read_bytes()


def test_selftest_passes(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "PASS kernel-normalisation" in out
    assert "FAIL" not in out


def test_custom_grid_case(tmp_path):
    # a flat surface loaded from CSV must reproduce the flat-plane run
    import numpy as np

    z = np.zeros((32, 16))
    zpath = tmp_path / "z.csv"
    np.savetxt(zpath, z, delimiter=",")
    out = tmp_path / "run"
    rc = main([
        "solve", "--out", str(out),
        "--override", "case=custom-grid",
        "--override", f"field.z_csv={zpath}",
        "--override", "field.z_nx=32", "--override", "field.z_ny=16",
        "--override", "reference.kind=exact",
        "--override", "solver.h=0.05", "--override", "solver.eps=0.005",
        "--override", "solver.ds=0.01",
        "--override", "output.nx=50", "--override", "output.ny=10",
    ])
    assert rc == 0
    u = np.loadtxt(out / "u.csv", delimiter=",")
    assert np.abs(u - 1e-3).max() / 1e-3 < 5e-3


def test_step_length_warning(caplog):
    import logging as _logging
    import math

    from partflow.fields import make_tilted_plane_field
    from partflow.grid import DomainSpec
    from partflow.particles import SolverParams, trace_all

    dom = DomainSpec(1.0, 0.25)
    f = make_tilted_plane_field(math.radians(39.0), None, 1e-3, 0.0, dom)
    with caplog.at_level(_logging.WARNING):
        trace_all(f, SolverParams(h=1 / 40, eps=1 / 40, ds=0.16), dom)
    assert any("kernel radius" in rec.message for rec in caplog.records)
