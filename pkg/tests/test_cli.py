import csv
import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from orlicz_lab import cli, reproduce
from orlicz_lab.measure_ops import SampledRealFunction, function_to_dict
from orlicz_lab.orlicz_core import Power, to_dict
from orlicz_lab.report import load_schema


def run(tmp_path, *argv):
    out = tmp_path / "out"
    code = cli.main([*argv, "--out", str(out)])
    doc = json.loads((out / "report.json").read_text())
    jsonschema.validate(doc, load_schema())
    return code, doc, out


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(p)


def read_csv(path):
    rows = list(csv.reader(open(path)))
    return rows[0], np.array(rows[1:], float)


def test_analyze_power(tmp_path):
    spec = write(tmp_path, "m.json", to_dict(Power(1.5)))
    code, doc, out = run(tmp_path, "analyze", "--spec", spec)
    assert code == 0 and doc["status"] == "ok"
    idx = doc["results"]["indices"]
    assert idx["infinity"]["alpha"]["point"] == pytest.approx(1.5)
    assert doc["results"]["delta2"]["global"]["value"] == pytest.approx(2 ** 1.5)
    head, rows = read_csv(out / "conjugate.csv")
    # conjugate of u^p is (p-1) (u/p)^{p/(p-1)}
    assert head == ["u", "conjugate"]
    assert np.allclose(rows[:, 1], 0.5 * (rows[:, 0] / 1.5) ** 3, rtol=1e-6)
    head, rows = read_csv(out / "fundamental.csv")
    assert np.allclose(rows[:, 1], rows[:, 0] ** (1 / 1.5), rtol=1e-10)


def test_build_psi_then_check_with_it(tmp_path):
    spec = write(tmp_path, "m.json", to_dict(Power(1.5)))
    fspec = write(tmp_path, "f.json", function_to_dict(SampledRealFunction.power_log(0.3)))
    code, doc, out = run(tmp_path, "build-psi", "--spec", spec, "--f-spec", fspec)
    assert code == 0 and (out / "psi.json").exists() and (out / "psi.csv").exists()
    assert doc["results"]["alpha_zero"]["point"] == pytest.approx(2.0, abs=0.02)
    code, doc, out2 = run(tmp_path / "b", "check", "--spec", spec, "--f-spec", fspec,
                          "--psi", str(out / "psi.json"))
    assert code == 0
    assert doc["results"]["verdict"]["strongly_embedded"] == "yes"
    head, rows = read_csv(out2 / "dilation.csv")
    assert head == ["n", "LM_norm", "L1_norm"] and rows.shape == (21, 3)


def test_simulate_rademacher(tmp_path):
    code, doc, out = run(tmp_path, "simulate", "--preset", "rademacher", "--paths", "20000",
                         "--corpus", "6", "--seed", "3")
    assert code == 0
    head, rows = read_csv(out / "corpus.csv")
    assert head == ["profile", "empirical", "bootstrap_se", "l2_norm"]
    assert np.all(np.abs(rows[:, 1] - rows[:, 3]) <= 5 * rows[:, 2] + 1e-12)
    assert doc["config"]["seed"] == 3 and doc["config"]["paths"] == 20000


def test_simulate_pair_writes_corpus_and_modulus(tmp_path):
    spec = write(tmp_path, "m.json", to_dict(Power(1.5)))
    fspec = write(tmp_path, "f.json", function_to_dict(SampledRealFunction.power_log(0.3)))
    code, doc, out = run(tmp_path, "simulate", "--spec", spec, "--f-spec", fspec, "--paths",
                         "4096", "--corpus", "4", "--ball-size", "2")
    assert code == 0
    assert (out / "corpus.csv").exists()
    head, rows = read_csv(out / "modulus.csv")
    assert head == ["delta", "modulus"] and np.all(np.diff(rows[:, 1]) <= 1e-12)


def test_simulate_needs_inputs(tmp_path):
    code, doc, _ = run(tmp_path, "simulate")
    assert code == 2 and doc["status"] == "error"


def test_malformed_json_reports_line_and_column(tmp_path, capsys):
    spec = write(tmp_path, "bad.json", '{"kind": "power",\n  "p": }')
    code, doc, _ = run(tmp_path, "analyze", "--spec", spec)
    assert code == 2
    assert "line 2, column" in doc["diagnostics"][0]
    assert "line 2" in capsys.readouterr().err


def test_invalid_spec_and_function_outside_space(tmp_path):
    spec = write(tmp_path, "m.json", {"kind": "power", "p": 0.5})
    assert run(tmp_path, "analyze", "--spec", spec)[0] == 2
    spec = write(tmp_path, "m2.json", to_dict(Power(2.0)))
    fspec = write(tmp_path, "f.json", function_to_dict(SampledRealFunction.power_log(0.5)))
    code, doc, _ = run(tmp_path / "b", "build-psi", "--spec", spec, "--f-spec", fspec)
    assert code == 2 and doc["diagnostics"][0].startswith("precondition")


def test_bad_t_range(tmp_path):
    spec = write(tmp_path, "m.json", to_dict(Power(2.0)))
    assert run(tmp_path, "analyze", "--spec", spec, "--tmin", "1", "--tmax", "0.5")[0] == 2


def test_reproduce_exit_codes(tmp_path, monkeypatch):
    ok = reproduce.CheckResult(1, "stub")
    bad = reproduce.CheckResult(2, "stub", failures=["band missed"])
    monkeypatch.setattr(cli, "CHECKS", {1: lambda: ok, 2: lambda: bad})
    monkeypatch.setattr(cli, "BUNDLES", {"good": (1,), "mixed": (1, 2)})
    code, doc, _ = run(tmp_path, "reproduce", "good")
    assert code == 0 and doc["checks"][0]["passed"]
    code, doc, _ = run(tmp_path / "b", "reproduce", "mixed")
    assert code == 1 and doc["status"] == "band-violation"
    assert run(tmp_path / "c", "reproduce", "nope")[0] == 2


def test_threads_variable_recorded(tmp_path, monkeypatch):
    monkeypatch.setenv("ORLICZ_LAB_THREADS", "3")
    spec = write(tmp_path, "m.json", to_dict(Power(2.0)))
    assert run(tmp_path, "analyze", "--spec", spec)[1]["config"]["threads"] == 3


def test_console_script_prints_report_without_out(tmp_path):
    spec = write(tmp_path, "m.json", to_dict(Power(2.0)))
    proc = subprocess.run([sys.executable, "-m", "orlicz_lab.cli", "analyze", "--spec", spec],
                          capture_output=True, text=True, check=True)
    doc = json.loads(proc.stdout)
    jsonschema.validate(doc, load_schema())
    assert doc["command"] == "analyze"
