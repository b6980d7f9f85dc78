import csv
import json
import math

import pytest

from blowup2d.cli import DEFAULTS, check_config, main, read_config
from blowup2d.errors import DomainError
from blowup2d.similarity import TIMELINE_HEADER


def write_cfg(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def load_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


# -- configuration -----------------------------------------------------------

def test_read_config_types_and_defaults(tmp_path):
    path = write_cfg(tmp_path, """
        # smoke grid
        N = 64          # physical resolution
        p = 3.5
        bracket = -0.1,0.1

        out = somewhere
    """)
    cfg = read_config(path)
    assert cfg["N"] == 64 and isinstance(cfg["N"], int)
    assert cfg["p"] == 3.5
    assert cfg["bracket"] == "-0.1,0.1"
    assert cfg["out"] == "somewhere"
    # untouched keys keep their defaults
    assert cfg["L"] == DEFAULTS["L"]
    assert cfg["a_values"] == DEFAULTS["a_values"]


def test_read_config_rejects_malformed(tmp_path):
    with pytest.raises(DomainError, match="unknown config key"):
        read_config(write_cfg(tmp_path, "mystery = 1\n"))
    with pytest.raises(DomainError, match="repeated config key"):
        read_config(write_cfg(tmp_path, "N = 64\nN = 128\n"))
    with pytest.raises(DomainError, match="bad value"):
        read_config(write_cfg(tmp_path, "N = sixty-four\n"))
    with pytest.raises(DomainError, match="KEY = value"):
        read_config(write_cfg(tmp_path, "just some words\n"))


def test_check_config_guards_module_preconditions():
    for key, val, msg in (
            ("bracket", "0.1,0.1", "lo < hi"),
            ("n_theta", 98, "multiple of 4"),
            ("N", 63, "even"),
            ("cfl", 1.5, "CFL"),
            ("t_end", -1.5, "t_end"),
            ("a_values", "0.5,2.0", "a_values"),
            ("model", "sphere", "model"),
            ("forcing", "squarewave", "forcing kind"),
            ("p", 7.0, "p")):
        cfg = dict(DEFAULTS)
        cfg[key] = val
        with pytest.raises(DomainError, match=msg):
            check_config(cfg)
    check_config(dict(DEFAULTS))  # the defaults themselves validate


# -- verify ------------------------------------------------------------------

def test_verify_default_config_passes(tmp_path):
    out = tmp_path / "v"
    assert main(["verify", "--out", str(out)]) == 0
    sc = load_json(out / "scorecard.json")
    assert sc["all_passed"]
    assert [s["name"] for s in sc["suites"]] == [
        "stationary", "eigen", "projector", "ellipse_mass",
        "integral_table", "hardy_sobolev"]
    assert all(s["worst"] <= s["tolerance"] for s in sc["suites"])
    assert not sc["regime"]["near_boundary"]
    man = load_json(out / "manifest.json")
    assert man["command"] == "verify"
    assert man["files"] == ["scorecard.json"]
    assert man["constants"]["p"] == 3.0
    assert set(man["versions"]) == {"python", "numpy", "scipy", "blowup2d"}


def test_verify_near_boundary_regime(tmp_path):
    cfg = write_cfg(tmp_path, "p = 4.99\n")
    out = tmp_path / "v"
    assert main(["verify", "--config", cfg, "--out", str(out)]) == 0
    sc = load_json(out / "scorecard.json")
    assert sc["all_passed"]
    assert sc["regime"]["near_boundary"]
    assert sc["regime"]["alpha"] == pytest.approx(0.01 / 7.98, rel=1e-12)
    hardy = next(s for s in sc["suites"] if s["name"] == "hardy_sobolev")
    # the trace-ratio bound scales like alpha**-0.5 toward p -> 5
    assert hardy["tolerance"] > 10.0
    assert hardy["passed"]


def test_verify_failure_names_the_suite(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "n_r = 8\nn_theta = 8\n")
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "v")]) == 1
    err = capsys.readouterr().err
    assert "stationary" in err and "failed" in err
    sc = load_json(tmp_path / "v" / "scorecard.json")
    assert not sc["all_passed"]


def test_verify_seed_flag_overrides_config(tmp_path):
    out = tmp_path / "v"
    assert main(["verify", "--out", str(out), "--seed", "7"]) == 0
    assert load_json(out / "manifest.json")["config"]["seed"] == 7


# -- simulate ----------------------------------------------------------------

SMOKE = "N = 64\nn_r = 32\nn_theta = 64\n"


def test_simulate_smoke_emits_all_files(tmp_path):
    cfg = write_cfg(tmp_path, SMOKE)
    out = tmp_path / "deep" / "nested" / "dir"  # created on demand
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    for name in ("u_final.bin", "u_final.bin.json", "freeze_t.bin",
                 "freeze_t.bin.json", "surface.csv", "surface_report.json",
                 "timeline.csv", "residuals.csv", "manifest.json"):
        assert (out / name).exists(), name
    man = load_json(out / "manifest.json")
    assert man["walltime_s"] < 60.0
    assert sorted(man["files"]) == man["files"]
    rep = load_json(out / "surface_report.json")
    assert rep["slope_fit"] < 0.0  # faces slope down away from the apex
    assert rep["lipschitz"]["ok"]


def test_simulate_reruns_are_byte_identical(tmp_path):
    cfg = write_cfg(tmp_path, SMOKE)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(out2)]) == 0
    for name in ("surface.csv", "timeline.csv", "residuals.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name
    assert (out1 / "freeze_t.bin").read_bytes() \
        == (out2 / "freeze_t.bin").read_bytes()


def test_simulate_timeline_covers_all_thresholds(tmp_path):
    cfg = write_cfg(tmp_path, SMOKE)
    out = tmp_path / "r"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    rows = read_rows(out / "timeline.csv")
    assert rows[0] == list(TIMELINE_HEADER)
    body = rows[1:]
    assert len(body) == 27  # 3 thresholds x 3 depths x 3 wedge ratios
    a_col = sorted({float(r[3]) for r in body})
    assert a_col == [1.2, 2.0, 5.0]
    for r in body:
        assert 0.0 <= float(r[1]) <= float(r[0])  # wedge ordering
        assert float(r[2]) < 0.0  # measured-slope surface time


# -- shoot -------------------------------------------------------------------

def test_shoot_reduced_defaults_survive(tmp_path):
    out = tmp_path / "s"
    assert main(["shoot", "--out", str(out)]) == 0
    res = load_json(out / "shoot_result.json")
    assert res["mode"] == "reduced"
    assert res["survived"] and res["exit_time"] is None
    assert res["horizon"] == 300.0  # 100 * s0 by default
    assert res["bracket"][0] < res["nu0"] < res["bracket"][1]
    rows = read_rows(out / "trajectory.csv")
    assert rows[0] == ["s", "qnorm", "xi", "nu", "trap_norm", "phi"]
    assert all(abs(float(r[5])) <= 1.0 for r in rows[1:])


def test_shoot_scan_exit_map(tmp_path):
    out = tmp_path / "s"
    assert main(["shoot", "--scan", "--out", str(out)]) == 0
    rows = read_rows(out / "scan.csv")
    assert rows[0] == ["nu0", "exit_time", "side", "phi_exit", "truncated"]
    body = rows[1:]
    assert len(body) == 41
    # the boundary seeds start on the trap boundary and exit immediately,
    # with opposite signs
    first, last = body[0], body[-1]
    assert float(first[1]) == 3.0 and float(first[3]) == -1.0
    assert float(last[1]) == 3.0 and float(last[3]) == 1.0
    sides = [float(r[2]) for r in body]
    assert sides == sorted(sides)  # monotone exit-side map
    assert sides.count(0.0) >= 1  # at least one survivor
    fan = read_rows(out / "fan.csv")
    assert fan[0] == ["nu0", "s", "phi"]
    assert len({r[0] for r in fan[1:]}) == 41


def test_shoot_scan_threads_match_serial(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["shoot", "--scan", "--out", str(out1)]) == 0
    assert main(["shoot", "--scan", "--out", str(out2),
                 "--threads", "2"]) == 0
    assert (out1 / "scan.csv").read_bytes() == (out2 / "scan.csv").read_bytes()
    assert (out1 / "fan.csv").read_bytes() == (out2 / "fan.csv").read_bytes()


def test_shoot_rejects_degenerate_bracket(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "bracket = 0.1,0.1\n")
    assert main(["shoot", "--config", cfg,
                 "--out", str(tmp_path / "s")]) == 1
    assert "lo < hi" in capsys.readouterr().err


def test_shoot_pde_variant(tmp_path):
    cfg = write_cfg(tmp_path, "N = 96\nbracket = -0.096,0.096\n"
                              "horizon = 4.0\n")
    out = tmp_path / "s"
    assert main(["shoot", "--pde", "--config", cfg, "--out", str(out)]) == 0
    res = load_json(out / "shoot_result.json")
    assert res["mode"] == "pde"
    assert res["bracket"] == [-0.096, 0.096]
    rows = read_rows(out / "trajectory.csv")
    assert float(rows[1][0]) == 3.0  # ladder starts at the data clock
    assert -0.096 < res["nu0"] < 0.096


# -- timeline and surface ----------------------------------------------------

def test_timeline_command_model_surface(tmp_path):
    out = tmp_path / "t"
    assert main(["timeline", "--out", str(out)]) == 0
    rows = read_rows(out / "timeline.csv")
    assert rows[0] == list(TIMELINE_HEADER)
    assert len(rows) == 28
    for r in rows[1:]:
        assert float(r[2]) == -float(r[0])  # model surface T = -x1
        assert float(r[4]) > 0.0  # loosing clock is a forward time


def test_surface_command_model(tmp_path):
    out = tmp_path / "s"
    assert main(["surface", "--out", str(out)]) == 0
    rep = load_json(out / "surface_report.json")
    # exact pyramid: both bounds tight, apex suspect, no flatness term
    assert rep["pyramid"]["lower_fraction"] == 1.0
    assert rep["pyramid"]["upper_fraction"] == 1.0
    assert rep["margins"]["origin"]["label"] == "suspect"
    assert rep["flatness"]["C0_hat"] == pytest.approx(0.0, abs=1e-12)
    rows = read_rows(out / "surface.csv")
    assert rows[0] == ["x1", "x2", "T", "grad1", "grad2", "margin",
                       "classification"]


def test_surface_command_from_dump(tmp_path):
    sim_cfg = write_cfg(tmp_path, SMOKE, name="sim.cfg")
    run = tmp_path / "run"
    assert main(["simulate", "--config", sim_cfg, "--out", str(run)]) == 0
    cfg = write_cfg(tmp_path, f"field = {run / 'freeze_t.bin'}\n",
                    name="surf.cfg")
    out = tmp_path / "s"
    assert main(["surface", "--config", cfg, "--out", str(out)]) == 0
    rep = load_json(out / "surface_report.json")
    assert rep["t0_fit"] == load_json(run / "surface_report.json")["t0_fit"]


def test_surface_command_missing_dump(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "field = nowhere.bin\n")
    assert main(["surface", "--config", cfg,
                 "--out", str(tmp_path / "s")]) == 1
    assert "not found" in capsys.readouterr().err
