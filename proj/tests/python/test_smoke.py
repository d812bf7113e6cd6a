"""Smoke tests for the python bindings."""

import json

import numpy as np
import pytest

import vilab


CANONICAL = json.dumps({"alpha": 0.5, "t": 1.0, "tau": 0.0, "k_fixed": 0.5})


def test_solve_canonical():
    out = vilab.solve(CANONICAL)
    e_n = out["non_integration"]["e_star"]
    e_v = out["integration"]["e_star"]
    assert 0.45 < e_n < 0.49
    assert 1.07 < e_v < 1.11
    assert e_v > e_n
    assert out["delta_surplus"] > 0
    assert out["choice"] == "not_integrate"  # K = 0.5 exceeds the gap


def test_expected_profits_consistent():
    e = 0.5
    total = (
        vilab.seller_expected_profit(CANONICAL, e)
        + vilab.buyer_expected_profit(CANONICAL, e)
        + e
    )
    integrated = vilab.integrated_expected_profit(CANONICAL, e) + e
    assert total == pytest.approx(integrated, abs=1e-8)


def test_surplus_gap_responses():
    out = vilab.surplus_gap_responses(CANONICAL)
    assert out["dt"] == pytest.approx(0.0, abs=1e-9)
    assert out["dtau"] < 0


def test_upstreamness_chain():
    flows = np.zeros((2, 2))
    flows[1, 0] = 40.0
    ups = vilab.upstreamness(flows, np.array([100.0, 0.0]), np.array([100.0, 40.0]))
    assert ups[0] == pytest.approx(1.0)
    assert ups[1] == pytest.approx(2.0)


def test_upstream_tariff_product():
    tariff = np.array([[10.0, 4.0]])
    req = np.array([[0.3, 0.0], [0.5, 0.0]])
    up = vilab.upstream_tariff(tariff, req)
    assert up[0, 0] == pytest.approx(5.0)


def test_classify_and_quartiles():
    ups = {"1000": 1.2, "2000": 3.4, "3000": 2.0, "4000": 0.7}
    assert vilab.classify_deal("1000", "2000", ups) == "backward"
    assert vilab.classify_deal("2000", "1000", ups) == "forward"
    assert vilab.classify_deal("2000", "2000", ups) == "horizontal"
    quartiles = vilab.upstream_quartiles(ups)
    assert quartiles["4000"] == 1
    assert quartiles["2000"] == 4


def test_synth_deterministic():
    config = json.dumps({"n_firms": 40, "n_industries": 8})
    a = vilab.synth_panel(config, seed=3)
    b = vilab.synth_panel(config, seed=3)
    assert a["backward_count"] == b["backward_count"]
    assert len(a["firm_id"]) == 40 * 10


def test_estimate_round_trip():
    config = json.dumps({"n_firms": 150, "n_industries": 15})
    panel = vilab.synth_panel(config, seed=11)
    spec = json.dumps(
        {
            "outcome": "backward_count",
            "regressors": ["downstream_tariff"],
            "fixed_effects": ["firm_id", "industry_code", "year"],
            "cluster": "firm_id",
            "estimator": "ppml",
        }
    )
    result = vilab.estimate(panel, spec)
    idx = result["terms"].index("downstream_tariff")
    assert abs(result["coef"][idx] - (-0.044)) < 3 * result["se"][idx]


def test_errors_are_typed():
    with pytest.raises(vilab.ConfigError):
        vilab.solve(json.dumps({"alpha": 1.7}))
