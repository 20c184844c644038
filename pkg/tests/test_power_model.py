"""Affine base-station power model: static draw plus per-connection draw."""

import numpy as np
import pytest

from bspower.power_model import BaseStationParams, consumption, consumption_trace
from bspower.units import Horizon

PARAMS = BaseStationParams(e_static_w=194.25, e_dynamic_w=24.0, max_connections=25)


def test_idle_station_draws_static_power_only():
    assert consumption(PARAMS, 0) == pytest.approx(194.25)


def test_fully_loaded_station():
    # 194.25 + 24 * 25
    assert consumption(PARAMS, 25) == pytest.approx(794.25)


def test_fractional_occupancy_is_allowed():
    assert consumption(PARAMS, 12.5) == pytest.approx(194.25 + 24.0 * 12.5)


def test_occupancy_outside_capacity_rejected():
    with pytest.raises(ValueError):
        consumption(PARAMS, -0.1)
    with pytest.raises(ValueError):
        consumption(PARAMS, 25.0001)


def test_affine_model_commutes_with_averaging():
    # consumption(mean occupancy) == mean consumption, exactly, because the
    # model is affine. This is what justifies feeding time-averaged
    # occupancy into the per-period energy accounting.
    rng = np.random.default_rng(4)
    occ = rng.uniform(0, 25, size=500)
    direct = np.mean([consumption(PARAMS, v) for v in occ])
    assert consumption(PARAMS, float(occ.mean())) == pytest.approx(direct, rel=1e-12)


def test_consumption_trace_matches_scalar_model():
    horizon = Horizon(T=6)
    occ = [0.0, 1.0, 5.5, 25.0, 10.0, 0.25]
    trace = consumption_trace(PARAMS, occ, horizon)
    expected = [consumption(PARAMS, v) * 1.0 for v in occ]
    np.testing.assert_allclose(trace, expected, rtol=1e-12)


def test_consumption_trace_scales_with_period_length():
    occ = [2.0, 3.0]
    hourly = consumption_trace(PARAMS, occ, Horizon(T=2, period_hours=1.0))
    halfhour = consumption_trace(PARAMS, occ, Horizon(T=2, period_hours=0.5))
    np.testing.assert_allclose(halfhour, hourly / 2.0, rtol=1e-12)


def test_consumption_trace_validation():
    horizon = Horizon(T=3)
    with pytest.raises(ValueError):
        consumption_trace(PARAMS, [1.0, 2.0], horizon)  # wrong length
    with pytest.raises(ValueError):
        consumption_trace(PARAMS, [1.0, -0.5, 2.0], horizon)
    with pytest.raises(ValueError):
        consumption_trace(PARAMS, [1.0, 26.0, 2.0], horizon)


def test_params_validation():
    with pytest.raises(ValueError):
        BaseStationParams(e_static_w=-1.0, e_dynamic_w=24.0, max_connections=25)
    with pytest.raises(ValueError):
        BaseStationParams(e_static_w=194.25, e_dynamic_w=-24.0, max_connections=25)
    with pytest.raises(ValueError):
        BaseStationParams(e_static_w=194.25, e_dynamic_w=24.0, max_connections=0)
