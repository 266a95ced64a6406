#!/usr/bin/env python3
"""
Tests for the mass / check / boost / catalog command line
"""
import json
import os
import sys

import pandas as pd
import pytest

# Add the project root to Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from alh import cli
from alh.services import oracle

SPECS = os.path.join(os.path.dirname(os.path.abspath(__file__)), "specs")

POLAR_CHART = {
    "coordinates": [
        {"name": "r", "lower": 0.5},
        {"name": "theta", "lower": 0, "upper": "pi"},
        {"name": "phi", "period": "2*pi"},
    ],
    "asymptotic": "r",
}


def write_spec(tmp_path, document, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(document))
    return str(path)


def read_report(out):
    with open(os.path.join(out, "report.json")) as fh:
        return json.load(fh)


def test_catalog_lists_entries(capsys):
    assert cli.main(["catalog"]) == 0
    listing = json.loads(capsys.readouterr().out)
    names = [e["name"] for e in listing["entries"]]
    assert "hyperbolic" in names
    assert names == sorted(names)


def test_mass_of_hyperbolic_space(tmp_path):
    out = str(tmp_path / "out")
    assert cli.main(["mass", os.path.join(SPECS, "hyperbolic.json"), "--out", out]) == 0
    report = read_report(out)
    assert report["status"] == "converged"
    assert report["mode"] == "energy-momentum"
    assert max(abs(c) for c in report["energy_momentum"]["components"]) <= 1e-12
    assert report["energy_momentum"]["causal_class"] == "zero"
    table = pd.read_csv(os.path.join(out, "convergence.csv"))
    assert list(table.columns) == ["potential", "x", "m(x)", "extrapolant", "error_estimate"]
    assert len(table) == 16


def test_mass_of_birmingham_is_timelike_future(tmp_path):
    spec = write_spec(tmp_path, {
        "dimension": 3,
        "catalog": {"name": "birmingham", "params": {"k": 1, "m": 0.5}},
        "run": {"quadrature_order": 8},
    })
    out = str(tmp_path / "out")
    assert cli.main(["mass", spec, "--out", out]) == 0
    report = read_report(out)
    assert report["energy_momentum"]["causal_class"] == "timelike-future"
    assert report["config"]["quadrature_order"] == 8
    assert report["config"]["levels"] == [20.0, 40.0, 80.0, 160.0]


def test_mass_of_toroidal_end_is_negative(tmp_path):
    spec = write_spec(tmp_path, {
        "dimension": 3,
        "catalog": {"name": "birmingham", "params": {"k": 0, "m": -0.2}},
        "run": {"quadrature_order": 8},
    })
    out = str(tmp_path / "out")
    assert cli.main(["mass", spec, "--out", out]) == 0
    report = read_report(out)
    assert report["mode"] == "mass"
    assert report["end_type"] == "toroidal"
    assert report["masses"][0]["mass"] < 0
    assert report["masses"][0]["normalization"] == "alh-normalized"


def test_euclidean_components_diverge(tmp_path):
    out = str(tmp_path / "out")
    assert cli.main(["mass", os.path.join(SPECS, "euclidean.json"), "--out", out]) == 2
    report = read_report(out)
    assert report["status"] == "divergence"
    assert "conformal boundary" in report["divergence"]["message"]
    assert os.path.exists(os.path.join(out, "divergence.csv"))


def test_report_goes_to_stdout_without_out(capsys):
    assert cli.main(["mass", os.path.join(SPECS, "hyperbolic.json")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["energy_momentum"]["causal_class"] == "zero"


@pytest.mark.parametrize(
    "document",
    [
        {"dimension": 3, "catalog": {"name": "kerr"}},
        {"dimension": 2, "catalog": {"name": "hyperbolic"}},
        {"dimension": 3, "catalog": {"name": "hyperbolic"}, "colour": "blue"},
        {"dimension": 3, "catalog": {"name": "hyperbolic"}, "run": {"r_sequence": [20, 40, 80]}},
        {
            "dimension": 3,
            "chart": {"coordinates": [{"name": "r", "lower": 1}, {"name": "u"}, {"name": "v"}], "asymptotic": "r", "cross_section": "patch"},
            "components": {"r,r": "1/(1+r^", "u,u": "r^2", "v,v": "r^2"},
        },
        {
            "dimension": 3,
            "chart": {"coordinates": [{"name": "r", "lower": 1}, {"name": "u"}, {"name": "v"}], "asymptotic": "r", "cross_section": "patch"},
            "components": {"r,r": "1/(1+q^2)", "u,u": "r^2", "v,v": "r^2"},
        },
    ],
)
def test_input_errors_exit_1(tmp_path, document):
    assert cli.main(["mass", write_spec(tmp_path, document)]) == 1


def test_missing_and_malformed_files_exit_1(tmp_path):
    assert cli.main(["mass", str(tmp_path / "nope.json")]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{\"dimension\": 3,,}")
    assert cli.main(["check", str(bad)]) == 1


def test_check_hyperbolic_space_is_satisfied(tmp_path):
    out = str(tmp_path / "out")
    assert cli.main(["check", os.path.join(SPECS, "hyperbolic.json"), "--out", out]) == 0
    report = read_report(out)
    assert report["verdict"] == "hypotheses satisfied"
    assert report["boundary"] == {"coord": "r", "value": 1.0}
    assert report["mean_curvature_margin"] < 0


def test_check_shrunk_metric_is_violated(tmp_path):
    out = str(tmp_path / "out")
    assert cli.main(["check", os.path.join(SPECS, "shrunk_hyperbolic.json"), "--out", out]) == 3
    report = read_report(out)
    assert report["verdict"] == "hypotheses violated"
    assert report["seed"] == 20211


def test_boost_of_hyperbolic_space(tmp_path):
    out = str(tmp_path / "out")
    code = cli.main(["boost", os.path.join(SPECS, "hyperbolic.json"), "--dir", "1", "--beta", "0.5", "--out", out])
    assert code == 0
    report = read_report(out)
    assert report["status"] == "within tolerance"
    assert report["deviation"] <= 1e-10
    assert len(report["lorentz"]) == 4


def test_boost_input_errors(tmp_path):
    assert cli.main(["boost", os.path.join(SPECS, "hyperbolic.json"), "--dir", "5", "--beta", "0.5"]) == 1
    torus = write_spec(tmp_path, {"dimension": 3, "catalog": {"name": "birmingham", "params": {"k": 0, "m": -0.2}}})
    assert cli.main(["boost", torus, "--dir", "1", "--beta", "0.5"]) == 1


def test_mass_of_hyperbolic_components(tmp_path):
    """Written out by components there is no background to subtract"""
    spec = write_spec(tmp_path, {
        "dimension": 3,
        "chart": POLAR_CHART,
        "components": {"r,r": "1/(1+r^2)", "theta,theta": "r^2", "phi,phi": "r^2*sin(theta)^2"},
        "run": {"quadrature_order": 8},
    })
    out = str(tmp_path / "out")
    assert cli.main(["mass", spec, "--out", out]) == 0
    report = read_report(out)
    assert report["energy_momentum"]["causal_class"] == "zero"
    assert max(abs(c) for c in report["energy_momentum"]["components"]) <= 1e-12
    for entry in report["masses"]:
        assert abs(entry["mass"]) <= 1e-12


@pytest.mark.parametrize(
    "name, code",
    [
        ("birmingham.json", 0),
        ("schwarzschild_ads.json", 0),
        ("torus_negative.json", 0),
        ("hyperbolic.json", 0),
        ("euclidean.json", 2),
        ("shrunk_hyperbolic.json", 2),
    ],
)
def test_mass_runs_on_every_bundled_spec(tmp_path, name, code):
    out = str(tmp_path / "out")
    assert cli.main(["mass", os.path.join(SPECS, name), "--out", out]) == code
    assert os.path.exists(os.path.join(out, "report.json"))


def test_bundled_specs_are_all_listed():
    listed = {"birmingham.json", "schwarzschild_ads.json", "torus_negative.json",
              "hyperbolic.json", "euclidean.json", "shrunk_hyperbolic.json"}
    assert set(f for f in os.listdir(SPECS) if f.endswith(".json")) == listed


def test_schwarzschild_ads_components_are_timelike_future(tmp_path):
    out = str(tmp_path / "out")
    assert cli.main(["mass", os.path.join(SPECS, "schwarzschild_ads.json"), "--out", out]) == 0
    report = read_report(out)
    assert report["energy_momentum"]["causal_class"] == "timelike-future"
    m0 = report["energy_momentum"]["components"][0]
    assert m0 == pytest.approx(oracle.birmingham_mass(3, 1, 0.5), rel=1e-4)
    assert max(abs(c) for c in report["energy_momentum"]["components"][1:]) <= 1e-8 * m0


def test_repeated_runs_write_identical_files(tmp_path):
    outs = [str(tmp_path / "first"), str(tmp_path / "second")]
    for out in outs:
        assert cli.main(["mass", os.path.join(SPECS, "birmingham.json"), "--out", out]) == 0
    for name in ("report.json", "convergence.csv"):
        with open(os.path.join(outs[0], name), "rb") as a, open(os.path.join(outs[1], name), "rb") as b:
            assert a.read() == b.read()


def test_boost_of_birmingham(tmp_path):
    out = str(tmp_path / "out")
    code = cli.main(["boost", os.path.join(SPECS, "birmingham.json"), "--dir", "1", "--beta", "0.8", "--out", out])
    assert code == 0
    report = read_report(out)
    assert report["status"] == "within tolerance"
    assert report["deviation"] <= 1e-5
    assert report["norm2_deviation"] <= 1e-5
