import math

import pytest

pl = pytest.importorskip("pricelab")


def test_demand_sums_below_one_with_outside_good():
    q = pl.logit_demand([1.3, 1.3])
    assert len(q) == 2
    assert q[0] == pytest.approx(q[1])
    assert 0.0 < sum(q) < 1.0


def test_base_equilibria():
    nash = pl.solve_nash()
    mono = pl.solve_monopoly()
    assert nash.prices[0] == pytest.approx(1.306688, abs=1e-6)
    assert mono.prices[0] == pytest.approx(1.319616, abs=1e-6)
    assert nash.foc_residual < 1e-8
    assert mono.mean_profit() > nash.mean_profit()


def test_equilibrium_scales_with_inflation():
    base = pl.solve_nash()
    inflated = pl.solve_nash(cost=1.5, price_index=1.5)
    assert inflated.prices[0] == pytest.approx(1.5 * base.prices[0], rel=1e-9)


def test_margin_grid_endpoints():
    grid = pl.margin_grid()
    assert len(grid) == 15
    assert grid[0] == pytest.approx(-0.5)
    assert grid[-1] == pytest.approx(2.0)


def test_metrics():
    assert pl.delta(0.5, 0.0, 1.0) == pytest.approx(0.5)
    assert pl.delta(0.5, 1.0, 1.0) is None
    d = pl.decompose(0.5, 0.2, 1.0, 0.3, 0.9)
    assert d["delta"] == pytest.approx((d["nabla"] - d["inflation_effect"]) * d["xi"])


def test_time_to_supra_and_punishment():
    assert pl.time_to_supra([0.3] * 5000) == 1000
    assert pl.time_to_supra([-0.1] * 5000) is None
    assert pl.punishment_classify([5, 5, 4, 5, 5, 5, 5], 1) == "punishment"
    assert pl.punishment_classify([5, 5, 5, 5, 5, 5, 5], 1) == "none"


def test_statistics():
    d, label = pl.cohens_d([1.0, 2.0, 3.5], [0.5, 1.0, 2.0])
    assert d > 0
    assert label in {"Very large", "Huge", "Large"}
    assert pl.effect_label(0.5) == "Medium"
    w = pl.welch_t_test([1.0, 2.0, 3.0, 4.0], [2.0, 3.0, 4.0, 6.0])
    assert 0.0 < w["p"] < 1.0
    assert pl.epsilon(0, 1e-3) == 1.0
    assert pl.epsilon(1000, 1e-3) == pytest.approx(math.exp(-1.0))


def test_config_round_trip():
    cfg = pl.RunConfig()
    assert cfg["lr"] == "0.01"
    cfg["timesteps"] = 300
    again = pl.RunConfig.from_text(cfg.to_text())
    assert again["timesteps"] == "300"
    with pytest.raises(pl.ConfigError):
        cfg["no_such_key"] = 1


def test_tiny_run():
    cfg = pl.RunConfig()
    for key, value in {"timesteps": 400, "h": 8, "batch_size": 16, "repetitions": 2,
                       "rho": 0.05, "master_seed": 3}.items():
        cfg[key] = value
    out = pl.run_in_sample(cfg)
    assert out["failures"] == 0
    assert len(out["runs"]) == 2
    assert all(r["steps"] == 400 for r in out["runs"])
    assert pl.run_in_sample(cfg)["per_run_mu"] == out["per_run_mu"]
