"""Smoke tests against the built extension module."""

import json
import os
import sys

import pytest

EXT_DIR = os.environ.get("PISTAB_EXT_DIR")
PKG_DIR = os.environ.get("PISTAB_PKG_DIR")
for p in (EXT_DIR, PKG_DIR):
    if p and p not in sys.path:
        sys.path.insert(0, p)

import pistab  # noqa: E402

FIXTURES = os.environ.get("PISTAB_FIXTURE_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "fixtures"))


def fx(name):
    return os.path.join(FIXTURES, name)


def test_version():
    assert pistab.__version__


def test_validate_reports_structure():
    report = pistab.validate_file(fx("toy_bidirectional.json"))
    assert report["ok"] is True
    assert report["failures"] == []


def test_parse_error_is_raised():
    with pytest.raises(ValueError):
        pistab.validate_file(fx("does_not_exist.json"))


def test_analyze_scalar_ode_verdicts():
    stable = pistab.analyze_file(fx("ode_stable.json"), d1=0, d2=0)
    assert stable["verdict"] == "stable-certified"
    assert stable["schema"] == "pistab-report/1"

    unstable = pistab.analyze_file(fx("ode_unstable.json"), d1=0, d2=0)
    assert unstable["verdict"] == "unknown-infeasible"


def test_analyze_heat_actuator_certifies():
    report = pistab.analyze_file(fx("heat_actuator.json"), d1=2, d2=2)
    assert report["verdict"] == "stable-certified"
    assert report["degrees"]["d1"] == 2


def test_simulate_heat_spectrum():
    out = pistab.simulate_file(fx("heat_dirichlet.json"), grid=64, t_final=1.0)
    assert abs(out["leading_eig_real"] + 9.8696) / 9.8696 < 0.02
    assert out["energy_ratio"] < 1.0
    assert len(out["time"]) == len(out["energy"])


def test_assemble_exposes_solver_contract():
    out = pistab.assemble_file(fx("heat_actuator.json"), d1=1, d2=1)
    assert [name for name, _ in out["blocks"]] == ["T_lyap", "T_neg"]
    assert len(out["rhs"]) > 0
    rows = {t[0] for t in out["triplets"]}
    assert rows == set(range(len(out["rhs"])))


def test_sweep_scalar_ode():
    out = pistab.sweep_file(fx("ode_param.json"), "mu", 0.0, 2.0, tol=0.25, d1=0, d2=0)
    assert out["none_certified"] is False
    assert 0.7 <= out["certified_threshold"] <= 1.001
