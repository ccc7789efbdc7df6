import csv
import json
import math
import time

import numpy as np
import pytest

from qbattery.cli import runner
from qbattery.cli.config import RunConfig, set_path
from qbattery.cli.main import main
from qbattery.cli.plotscript import emit_plotscript
from qbattery.cli.presets import PRESET_NAMES, preset
from qbattery.errors import NumericalInvariantError, ValidationError


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {k: np.array([float(r[k]) for r in rows]) for k in rows[0]}


@pytest.fixture(scope="module")
def preset_runs(tmp_path_factory):
    out = tmp_path_factory.mktemp("results")
    timings = {}
    for name in PRESET_NAMES:
        t0 = time.perf_counter()
        assert main(["run-preset", name, "--out", str(out)]) == 0
        timings[name] = time.perf_counter() - t0
    return out, timings


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_preset_runs_fast_with_full_grid(preset_runs, name):
    out, timings = preset_runs
    assert timings[name] < 10.0
    man = json.loads((out / name / "manifest.json").read_text())
    assert man["preset"] == name and man["schema_version"] == 1
    assert set(man["tolerances"]) == {"hermiticity", "trace", "positivity"}
    for curve in man["curves"]:
        assert curve["rows"] == curve["config"]["grid"]["n_points"] >= 500
        text = (out / name / curve["csv"]).read_bytes()
        assert b"\r" not in text and text.endswith(b"\n")
        assert len(text.splitlines()) == curve["rows"] + 1
        if curve["config"]["scenario"].startswith("markov"):
            assert curve["integrator"]["method"] == "rk4-fixed" and curve["integrator"]["step"] > 0


def test_preset_parameters():
    (c,) = preset("fig2a")
    assert c.parameters["ratio"] == 500 and c.parameters["c1"] == pytest.approx(1 / math.sqrt(2))
    assert c.parameters["initial"] == {"nu01": 1, "nu02": 0}
    assert [c.parameters["ratio"] for c in preset("fig2b") + preset("fig2c")] == [30, 0.3]
    for c in preset("fig4a"):
        p = c.parameters
        assert p["gamma_c"] == pytest.approx(0.9 * p["Gamma"]) and p["l1"] == p["l2"] == 0
    for c in preset("fig5a"):
        assert c.parameters["l1"] == c.parameters["l2"] == 1.0
        assert c.parameters["omega0"] == c.parameters["omegaL"]
    assert len(preset("fig3b")) == 10


def test_fig2a_transfer_peak(preset_runs):
    out, _ = preset_runs
    d = read_csv(out / "fig2a" / "R500.csv")
    i = int(np.argmax(d["dEB"]))
    assert d["dEB"][i] == pytest.approx(0.997, abs=1e-3)
    assert d["tau"][i] == pytest.approx(0.0063, abs=5e-4)


def test_fig3a_weak_coupling_never_charges(preset_runs):
    out, _ = preset_runs
    d = read_csv(out / "fig3a" / "R0.3.csv")
    assert np.all(d["ergotropy"] == 0.0)


def test_fig5b_dark_state_constant(preset_runs):
    out, _ = preset_runs
    d = read_csv(out / "fig5b" / "intermediate.csv")
    assert np.all(d["ergotropy_norm"] == 0.5)


def test_csv_format(preset_runs):
    out, _ = preset_runs
    lines = (out / "fig4a" / "Gamma0.5.csv").read_text().splitlines()
    assert lines[0].split(",")[:6] == ["tau", "dEA_abs", "dEB", "ergotropy", "ergotropy_norm", "rho11"]
    for line in lines[1:]:
        assert all(v == format(float(v), ".12g") for v in line.split(","))
    assert "-0," not in "\n".join(lines) + ","


def test_determinism_byte_identical(tmp_path):
    for name in ("fig2b", "fig4b"):
        main(["run-preset", name, "--out", str(tmp_path / "a")])
        main(["run-preset", name, "--out", str(tmp_path / "b")])
        for f in sorted((tmp_path / "a" / name).iterdir()):
            assert f.read_bytes() == (tmp_path / "b" / name / f.name).read_bytes()


def test_manifest_round_trip(tmp_path):
    main(["run-preset", "fig5b", "--out", str(tmp_path)])
    src = tmp_path / "fig5b"
    assert main(["run", "--config", str(src / "manifest.json"), "--out", str(tmp_path / "replay")]) == 0
    for f in src.iterdir():
        assert f.read_bytes() == (tmp_path / "replay" / f.name).read_bytes()


def test_show_then_run_single_config(tmp_path, capsys):
    assert main(["show-preset", "fig2a"]) == 0
    doc = json.loads(capsys.readouterr().out)
    (tmp_path / "c.json").write_text(json.dumps(doc))
    assert main(["validate", "--config", str(tmp_path / "c.json")]) == 0
    assert main(["run", "--config", str(tmp_path / "c.json"), "--out", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "R500.csv").is_file()
    assert main(["show-preset", "fig2a", "--curve", "3"]) == 2


# --- sweeps -----------------------------------------------------------------------

def _write_config(tmp_path, name, idx=0):
    path = tmp_path / f"{name}_{idx}.json"
    path.write_text(json.dumps(preset(name)[idx].to_dict()))
    return path


def test_sweep_ratio_reproduces_fig2_panels(tmp_path):
    cfg = _write_config(tmp_path, "fig2b")
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--config", str(cfg), "--param", "parameters.ratio",
                 "--values", "0.3,30,500", "--out", str(out)]) == 0
    d = read_csv(out)
    assert d["sweep_value"].size == 3 * 1001
    for v in (0.3, 30, 500):
        sel = d["sweep_value"] == v
        single = runner.compute(RunConfig.from_dict(set_path(preset("fig2b")[0].to_dict(), "parameters.ratio", v)))
        np.testing.assert_allclose(d["dEB"][sel], single.rows[:, single.columns.index("dEB")], atol=1e-12)


def test_sweep_collective_decay_barely_matters(tmp_path):
    cfg = _write_config(tmp_path, "fig4a", 2)  # Gamma = 0.01
    out = tmp_path / "g.csv"
    assert main(["sweep", "--config", str(cfg), "--param", "parameters.gamma_c",
                 "--values", "0,0.0045,0.009", "--out", str(out)]) == 0
    d = read_csv(out)
    curves = [d["ergotropy_norm"][d["sweep_value"] == v] for v in (0, 0.0045, 0.009)]
    assert max(np.max(np.abs(c - curves[0])) for c in curves) < 0.01


def test_sweep_empty_values(tmp_path):
    out = tmp_path / "empty.csv"
    with pytest.raises(ValidationError):
        runner.run_sweep(preset("fig2a")[0].to_dict(), "parameters.ratio", [], out)
    assert not out.exists()


def test_sweep_reports_bad_values_by_index_without_output(tmp_path, capsys):
    cfg = _write_config(tmp_path, "fig4a")
    out = tmp_path / "bad.csv"
    code = main(["sweep", "--config", str(cfg), "--param", "parameters.gamma_c",
                 "--values", "0.1,0.7,0.2", "--out", str(out)])
    assert code == 2
    err = capsys.readouterr().err
    assert "value #1" in err and "value #0" not in err
    assert not out.exists()


def test_sweep_unknown_path(tmp_path):
    cfg = _write_config(tmp_path, "fig4a")
    assert main(["sweep", "--config", str(cfg), "--param", "parameters.nope.x",
                 "--values", "1", "--out", str(tmp_path / "x.csv")]) == 2
    assert main(["sweep", "--config", str(cfg), "--param", "parameters.bogus",
                 "--values", "1", "--out", str(tmp_path / "x.csv")]) == 2


# --- plot scripts -------------------------------------------------------------------

def test_plotscript_axes(tmp_path):
    csv_path = tmp_path / "data.csv"
    csv_path.write_text("tau,dEB\n0,0\n")
    text = emit_plotscript(csv_path, "fig2a").read_text()
    assert "set_xlabel('λτ')" in text and "set_ylabel('|ΔE|/ω0')" in text
    compile(text, "plot", "exec")
    assert "set_xlabel('lτ')" in emit_plotscript(csv_path, "fig5a", tmp_path / "p.py").read_text()


def test_plotscript_errors(tmp_path):
    csv_path = tmp_path / "data.csv"
    csv_path.write_text("tau\n0\n")
    with pytest.raises(ValidationError):
        emit_plotscript(csv_path, "fig9z")
    with pytest.raises(ValidationError):
        emit_plotscript(tmp_path / "missing.csv", "fig2a")
    assert main(["plot-script", str(csv_path), "fig9z"]) == 2


# --- validation and exit codes -------------------------------------------------------

@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.update(scenario="quantum"),
        lambda d: d["grid"].update(n_points=1),
        lambda d: d["grid"].update(t_min=-1.0),
        lambda d: d.update(outputs=["colour"]),
        lambda d: d["parameters"].update(gamma_c=0.6),
        lambda d: d["parameters"].update(speed=1),
        lambda d: d["parameters"].update(initial={"basis": 7}),
        lambda d: d.update(schema_version=99),
        lambda d: d.pop("grid"),
    ],
)
def test_invalid_configs_exit_2(tmp_path, mutate):
    doc = preset("fig4a")[0].to_dict()
    mutate(doc)
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert main(["validate", "--config", str(path)]) == 2
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "o")]) == 2
    assert not (tmp_path / "o").exists()


def test_missing_and_broken_files_exit_2(tmp_path):
    assert main(["validate", "--config", str(tmp_path / "none.json")]) == 2
    (tmp_path / "broken.json").write_text("{")
    assert main(["validate", "--config", str(tmp_path / "broken.json")]) == 2
    assert main(["run-preset", "fig9", "--out", str(tmp_path)]) == 2


def test_numerical_failure_exit_3(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise NumericalInvariantError("positivity lost")

    monkeypatch.setattr(runner, "evolve_series", boom)
    assert main(["run-preset", "fig4a", "--out", str(tmp_path)]) == 3
    assert not (tmp_path / "fig4a").exists()


def test_nonmarkov_initial_variants():
    base = preset("fig2b")[0].to_dict()
    base["parameters"]["initial"] = {"nu01": [0.6, 0.0], "nu02": [0.0, 0.8]}
    t = runner.compute(RunConfig.from_dict(base))
    assert t.rows[0, t.columns.index("p_battery")] == pytest.approx(0.64)
    base["parameters"]["initial"] = {"nu01": 1, "nu02": 1}
    with pytest.raises(ValidationError):
        RunConfig.from_dict(base)
