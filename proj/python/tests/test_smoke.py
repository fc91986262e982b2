import math

import pytest

import ironspec


def test_reference_parameters_round_trip():
    p = ironspec.reference_parameters()
    assert p["Tf_sat"] == pytest.approx(0.3)
    assert ironspec.pin_parameters(p)["k_IRP_Ft"] < p["k_Ft_prod"]
    with pytest.raises(KeyError):
        ironspec.steady_state({"k_bogus": 1.0})


def test_steady_state_is_stable():
    ss = ironspec.steady_state(ironspec.reference_parameters())
    assert ss["stable"]
    assert all(ev < 0 for ev in ss["eigenvalues"])
    assert ss["state"]["FPN1a"] == pytest.approx(5e-7, rel=1e-9)


def test_cutoff_experiment():
    out = ironspec.run_experiment(ironspec.reference_parameters())
    assert out["t"][0] == 0.0
    assert out["t"][-1] == pytest.approx(48 * 3600.0)
    assert len(out["Fe"]) == len(out["t"])
    assert out["plateau_duration"] >= 10 * 3600.0
    assert out["ft_exhaustion_time"] < out["fe_exhaustion_time"]


def test_monitor_reference_and_starved():
    ok = ironspec.monitor(ironspec.reference_parameters())
    assert ok["satisfied"] and ok["robustness"] > 0
    assert len(ok["conjuncts"]) == 19
    starved = ironspec.monitor({"k_Fe_input": 0.0})
    assert not starved["satisfied"]
    assert any(not sat for sat, _, _ in starved["conjuncts"].values())
    inline = ironspec.monitor(ironspec.reference_parameters(), "alw_[0, 10] (Fe[t] > 0)")
    assert inline["satisfied"]
    with pytest.raises(ironspec.ParseError):
        ironspec.monitor(ironspec.reference_parameters(), "alw_[0, (Fe[t] > 0")


def test_propagate_and_contract():
    box = ironspec.propagate("x + y = 2", {"x": (0.0, 3.0), "y": (0.0, 5.0)})
    assert box["x"][1] == pytest.approx(2.0)
    assert box["y"][1] == pytest.approx(2.0)
    with pytest.raises(ironspec.InfeasibleError):
        ironspec.propagate("x + y >= 10", {"x": (0.0, 1.0), "y": (0.0, 1.0)})
    matched = sum(d["matched"] for d in ironspec.contract())
    assert matched >= 6
    assert all(not math.isnan(d["after"][0]) for d in ironspec.contract())
