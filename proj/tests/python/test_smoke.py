import math

import pytest

import lograt


def test_threshold_of_three_values():
    assert lograt.threshold([0.0, 1.0, 2.0]) == pytest.approx(1 + math.sqrt(2 / 3), abs=1e-12)


def test_curvature_is_nonnegative():
    k = lograt.curvature([0.0, 1.0, -2.0], [-3.0, 0.5, 2.0])
    assert all(v >= 0 for v in k)
    assert k[0] == pytest.approx(3.0)


def test_constant_response_fit():
    x = [i / 11 for i in range(12)]
    f = lograt.fit(x, [3.25] * 12, lam=1.0)
    assert f.predict([0.0, 0.5, 1.0]) == pytest.approx([3.25] * 3, rel=1e-10)
    assert 2.0 - 1e-9 <= f.edf <= 12.0


def test_gcv_fit_picks_a_grid_value():
    x = [i / 29 for i in range(30)]
    y = [math.exp(math.sin(6 * t)) for t in x]
    f = lograt.fit(x, y)
    assert 1e-6 <= f.lam <= 1e4
    assert f.deviance_trace


def test_synthetic_anomaly_ranks_first():
    d = lograt.synth(anomalies=[(0, 0.45, 0.03, 2.0)], noise=0.1, seed=42)
    assert d["anomalous"] == ["Co"]
    ranked = lograt.rank(d["distances"], d["elements"], d["values"], top_k=5)
    assert len(ranked) == 5
    assert all("Co" in (a, b) for a, b, _, _ in ranked)
    assert ranked[0][3] == 1.0


def test_pair_profile_locates_the_anomaly():
    d = lograt.synth(anomalies=[(0, 0.45, 0.03, 2.0)], noise=0.1, seed=42)
    x = [(v - min(d["distances"])) / (max(d["distances"]) - min(d["distances"])) for v in d["distances"]]
    co = lograt.fit(x, d["values"][0])
    al = lograt.fit(x, d["values"][1])
    p = lograt.pair_profile(co, al)
    assert len(p["crossings"]) % 2 == 0
    assert any(iv["start"] <= 0.45 <= iv["end"] for iv in p["intervals"])


def test_errors_are_raised():
    with pytest.raises(lograt.Error):
        lograt.fit([0.0, 0.5, 1.0], [1.0, 2.0, 3.0], tweedie_power=2.5)
    with pytest.raises(ValueError):
        lograt.synth(samples=2)
