"""Policy replay, the no-scheduling baseline, reports, and sweeps."""

from dataclasses import replace

import numpy as np
import pytest

from bspower.calibration import (
    Calibration,
    default_calibration,
    default_price_space,
    default_renewable_space,
    default_traffic_profiles,
    derived_loss_cost,
    half_sine_profile,
    stepped_profile,
)
from bspower.evaluate import (
    DAYS_PER_MONTH,
    ExperimentReport,
    RealizedDay,
    ReplayError,
    baseline_policy,
    evaluate_policy,
    manifest_text,
    monthly_cost,
    sweep_arrival_rate,
    sweep_battery,
    sweep_cac,
)
from bspower.scenarios import (
    CompositeScenario,
    MarginalScenario,
    MarginalSpace,
    ScenarioSpace,
)
from bspower.stochastic import (
    StorageConfig,
    per_scenario_decomposition,
    solve_policy,
)
from bspower.traffic import uniform_traffic
from bspower.units import Horizon

from test_stochastic import random_instance, single_scenario


def cheap_calibration(T=24, replications=1):
    """Default shapes but a fixed consumption trace, skipping simulation."""
    cal = default_calibration(T)
    consumption = MarginalSpace(kind="consumption", scenarios=(
        MarginalScenario("fixed", 1.0, np.full(T, 300.0)),))
    return replace(cal, consumption=consumption, replications=replications)


# ---------------------------------------------------------------------------
# replay
# ---------------------------------------------------------------------------

def test_replay_reproduces_solver_cost_per_scenario():
    rng = np.random.default_rng(14)
    for _ in range(10):
        horizon, storage, space = random_instance(rng)
        policy = solve_policy(horizon, storage, space)
        total = 0.0
        for scen in space.scenarios:
            result = evaluate_policy(policy, RealizedDay.from_scenario(scen))
            total += scen.probability * result.cost_cents
        assert total == pytest.approx(policy.expected_cost, rel=1e-9, abs=1e-9)


def test_replay_battery_path_matches_policy():
    horizon = Horizon(T=3)
    storage = StorageConfig(capacity=1000.0, initial=0.0, terminal=0.0)
    space = single_scenario([10.0, 30.0, 99.0], [0.0, 0.0, 0.0],
                            [100.0, 300.0, 0.0])
    policy = solve_policy(horizon, storage, space)
    result = evaluate_policy(policy, RealizedDay.from_scenario(space.scenarios[0]))
    np.testing.assert_allclose(result.battery, policy.battery[0], atol=1e-7)
    np.testing.assert_allclose(result.purchase, policy.purchase[0], atol=1e-12)
    assert result.cost_cents == pytest.approx(4.0, abs=1e-9)


def test_replay_rejects_unknown_day_and_wrong_length():
    horizon = Horizon(T=2)
    storage = StorageConfig(capacity=100.0, initial=0.0, terminal=0.0)
    space = single_scenario([1.0, 1.0], [0.0, 0.0], [10.0, 0.0], label="w")
    policy = solve_policy(horizon, storage, space)
    with pytest.raises(KeyError):
        evaluate_policy(policy, RealizedDay("other", [1.0, 1.0], [0.0, 0.0],
                                            [10.0, 0.0]))
    with pytest.raises(ValueError):
        evaluate_policy(policy, RealizedDay("w", [1.0], [0.0], [10.0]))


def test_replay_flags_infeasible_schedules():
    horizon = Horizon(T=3)
    storage = StorageConfig(capacity=400.0, initial=100.0, terminal=100.0)
    space = single_scenario([10.0, 10.0, 10.0], [0.0, 0.0, 0.0],
                            [50.0, 50.0, 0.0])
    policy = solve_policy(horizon, storage, space)

    extra = policy.purchase.copy()
    extra[0, 0] += 600.0  # overcharges past capacity
    with pytest.raises(ReplayError, match="leaves"):
        evaluate_policy(replace(policy, purchase=extra),
                        RealizedDay.from_scenario(space.scenarios[0]))

    skipped = policy.purchase.copy()
    skipped[0, :] = 0.0  # battery drains below zero
    with pytest.raises(ReplayError):
        evaluate_policy(replace(policy, purchase=skipped),
                        RealizedDay.from_scenario(space.scenarios[0]))


def test_realized_day_validation():
    with pytest.raises(ValueError):
        RealizedDay("d", [1.0, -1.0], [0.0, 0.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        RealizedDay("d", [1.0, 1.0], [0.0], [1.0, 1.0])


def test_zero_consumption_day_with_matched_endpoints_is_free():
    horizon = Horizon(T=8)
    storage = StorageConfig(capacity=1500.0, initial=900.0, terminal=900.0)
    space = single_scenario(np.full(8, 14.0), np.zeros(8), np.zeros(8))
    policy = solve_policy(horizon, storage, space)
    day = RealizedDay.from_scenario(space.scenarios[0])
    result = evaluate_policy(policy, day)
    assert result.cost_cents == pytest.approx(0.0, abs=1e-9)
    assert baseline_policy(horizon, storage, day, hold_level=900.0) == 0.0


# ---------------------------------------------------------------------------
# baseline and cost reporting
# ---------------------------------------------------------------------------

def test_baseline_buys_only_the_shortfall():
    horizon = Horizon(T=3)
    storage = StorageConfig(capacity=2000.0, initial=500.0, terminal=500.0)
    day = RealizedDay("d", price=[10.0, 20.0, 10.0],
                      renewable=[50.0, 0.0, 400.0],
                      consumption=[150.0, 100.0, 100.0])
    cost = baseline_policy(horizon, storage, day)
    # shortfalls: 100 @ 10, 100 @ 20, 0 -> 1.0 + 2.0 cents; no holding cost
    assert cost == pytest.approx(3.0, abs=1e-12)


def test_baseline_holding_cost_uses_clamped_level():
    horizon = Horizon(T=4)
    coeff = 1e-3
    storage = StorageConfig(capacity=800.0, initial=0.0, terminal=0.0,
                            loss_cost_coeff=coeff)
    day = RealizedDay("d", price=np.full(4, 10.0), renewable=np.full(4, 50.0),
                      consumption=np.full(4, 50.0))
    # the constant hold level defaults to 1000 Wh but cannot exceed capacity
    assert baseline_policy(horizon, storage, day) == pytest.approx(
        coeff * 800.0 * 4, abs=1e-12)


def test_baseline_rejects_wrong_day_length():
    storage = StorageConfig(capacity=800.0, initial=0.0, terminal=0.0)
    day = RealizedDay("d", [10.0], [0.0], [50.0])
    with pytest.raises(ValueError):
        baseline_policy(Horizon(T=4), storage, day)


def test_adaptive_schedule_never_loses_to_constant_hold():
    # holding the battery at the endpoints' level is itself a feasible
    # schedule, so the optimized expected cost can only be lower
    cal = cheap_calibration().with_storage(initial=1000.0, terminal=1000.0)
    space = cal.scenario_space(seed=0)
    policy = per_scenario_decomposition(cal.horizon, cal.storage, space)
    base = sum(
        scen.probability * baseline_policy(cal.horizon, cal.storage,
                                           RealizedDay.from_scenario(scen),
                                           hold_level=1000.0)
        for scen in space.scenarios)
    assert policy.expected_cost <= base + 1e-6


def test_monthly_cost_conversion():
    assert DAYS_PER_MONTH == 30
    assert monthly_cost(100.0) == pytest.approx(30.0)
    # 49 cents/day is about $14.7/month, 42.63 about $12.79
    assert monthly_cost(49.0) == pytest.approx(14.7)
    assert round(monthly_cost(42.6333), 2) == 12.79
    with pytest.raises(ValueError):
        monthly_cost(-1.0)


# ---------------------------------------------------------------------------
# calibration profiles
# ---------------------------------------------------------------------------

def test_half_sine_profile_integrates_to_mean_times_window():
    values = half_sine_profile(195.0, (6.0, 18.0), 24)
    assert values.shape == (24,)
    assert values[:6].sum() == 0.0 and values[18:].sum() == 0.0
    assert values.sum() == pytest.approx(195.0 * 12.0, rel=1e-12)
    # symmetric about noon and peaked there
    np.testing.assert_allclose(values[6:12], values[12:18][::-1], rtol=1e-12)
    assert values.argmax() in (11, 12)
    with pytest.raises(ValueError):
        half_sine_profile(100.0, (20.0, 30.0), 24)


def test_stepped_profile_window():
    values = stepped_profile(12.0, 20.0, (12, 20), 24)
    assert set(values[:12]) == {12.0} and set(values[20:]) == {12.0}
    assert set(values[12:20]) == {20.0}


def test_default_spaces_are_valid_and_normalized():
    price = default_price_space()
    renewable = default_renewable_space()
    assert price.probabilities.sum() == pytest.approx(1.0)
    assert renewable.probabilities.sum() == pytest.approx(1.0)
    profiles = default_traffic_profiles()
    assert sum(p.probability for p in profiles) == pytest.approx(1.0)
    assert len(profiles) == 5


def test_derived_loss_cost_prices_expected_decay():
    price = default_price_space()
    # mean price: 0.6 * (16h at 12 + 8h at 20)/24 + 0.4 * 12 = 13.6 cents/kWh
    coeff = derived_loss_cost(price, 0.001)
    assert coeff == pytest.approx(0.001 * 13.6 / 1000.0, rel=1e-12)


def test_calibration_scenario_space_is_product_of_marginals():
    cal = cheap_calibration()
    space = cal.scenario_space(seed=0)
    assert len(space) == 2 * 2 * 1
    assert space.probabilities.sum() == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def test_report_validates_shape_and_order():
    with pytest.raises(ValueError):
        ExperimentReport("k", ("a", "b"), ((1.0,),))
    with pytest.raises(ValueError, match="non-decreasing"):
        ExperimentReport("k", ("a", "b"), ((2.0, 0.0), (1.0, 0.0)))
    report = ExperimentReport("k", ("a", "b"), ((1.0, 5.0), (2.0, None)))
    assert report.column_values("b") == [5.0, None]


def test_report_csv_formatting():
    report = ExperimentReport("k", ("n", "v"), ((1, 0.5), (2, None)))
    assert report.csv_text() == "n,v\n1,0.500000\n2,nan\n"


def test_manifest_is_stable_and_labelled():
    a = manifest_text("deadbeef", 7)
    b = manifest_text("deadbeef", 7)
    assert a == b
    assert "config_sha256: deadbeef" in a
    assert "seed: 7" in a
    assert "bspower" in a


# ---------------------------------------------------------------------------
# sweeps (small grids; full grids run in the acceptance suite)
# ---------------------------------------------------------------------------

def test_battery_sweep_levels_off_and_orders_scalings():
    cal = cheap_calibration()
    report = sweep_battery([500.0, 2000.0, 4000.0], [1.0, 1.5], cal, seed=0)
    assert report.columns == ("capacity_wh", "renewable_scale", "monthly_cost_usd")
    assert len(report.rows) == 6
    for scale in (1.0, 1.5):
        costs = [r[2] for r in report.rows if r[1] == scale]
        assert all(b <= a + 1e-9 for a, b in zip(costs, costs[1:])), costs
    plain = [r[2] for r in report.rows if r[1] == 1.0]
    boosted = [r[2] for r in report.rows if r[1] == 1.5]
    assert all(b <= a + 1e-9 for a, b in zip(plain, boosted))


def test_battery_sweep_clamps_endpoints_to_small_capacities():
    cal = cheap_calibration()
    report = sweep_battery([200.0, 1000.0], [1.0], cal, seed=0)
    costs = report.column_values("monthly_cost_usd")
    assert all(np.isfinite(c) for c in costs)
    assert costs[1] <= costs[0] + 1e-9


def test_battery_sweep_rejects_empty_grid():
    cal = cheap_calibration()
    with pytest.raises(ValueError):
        sweep_battery([], [1.0], cal)
    with pytest.raises(ValueError):
        sweep_battery([500.0], [], cal)


def test_cac_sweep_columns_and_reference():
    cal = cheap_calibration(replications=1)
    spec = uniform_traffic(2.0, cal.handoff_fraction, cal.horizon.T,
                           cal.mean_holding)
    report = sweep_cac([5, 25], spec, cal, seed=0)
    assert report.columns == ("threshold", "blocking", "dropping",
                              "cost_saving_pct")
    (tau_lo, b_lo, d_lo, s_lo), (tau_hi, b_hi, d_hi, s_hi) = report.rows
    assert (tau_lo, tau_hi) == (5, 25)
    assert b_lo >= b_hi and d_lo <= d_hi
    # threshold == channels is the no-reservation reference itself
    assert s_hi == pytest.approx(0.0, abs=1e-9)
    assert s_lo >= s_hi - 1e-9


def test_cac_sweep_validates_threshold_grid():
    cal = cheap_calibration(replications=1)
    spec = uniform_traffic(0.5, 0.3, cal.horizon.T)
    with pytest.raises(ValueError):
        sweep_cac([], spec, cal)
    with pytest.raises(ValueError):
        sweep_cac([0, 5], spec, cal)
    with pytest.raises(ValueError):
        sweep_cac([5, 26], spec, cal)


def test_arrival_sweep_monotone_on_small_grid():
    cal = cheap_calibration(replications=1)
    report = sweep_arrival_rate([0.2, 0.8], cal, seed=0)
    assert report.columns == ("arrival_rate_per_min", "avg_purchase_wh",
                              "avg_battery_wh")
    purchase = report.column_values("avg_purchase_wh")
    battery = report.column_values("avg_battery_wh")
    assert purchase[1] >= purchase[0] - 1e-9
    assert battery[1] >= battery[0] - 1e-9
    with pytest.raises(ValueError):
        sweep_arrival_rate([], cal)
    with pytest.raises(ValueError):
        sweep_arrival_rate([-0.1, 0.5], cal)


def test_arrival_sweep_zero_rate_draws_static_power_only():
    # no connections: the station draws its static 194.25 W each hour, and
    # with no renewable every Wh consumed before the final period must be
    # purchased, so the daily average spreads 23 purchased hours over 24
    cal = cheap_calibration()
    zero_renew = MarginalSpace(kind="renewable", scenarios=(
        MarginalScenario("none", 1.0, np.zeros(24)),))
    cal = replace(cal, renewable=zero_renew,
                  storage=StorageConfig(capacity=2000.0, initial=500.0,
                                        terminal=500.0))
    report = sweep_arrival_rate([0.0, 0.5], cal, seed=3)
    assert report.column_values("arrival_rate_per_min")[0] == 0.0
    purchase = report.column_values("avg_purchase_wh")
    assert purchase[0] == pytest.approx(194.25 * 23 / 24, rel=1e-9)
    assert purchase[1] > purchase[0]
