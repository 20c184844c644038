"""Policy evaluation, the constant-level baseline, and experiment sweeps.

evaluate_policy replays a solved schedule against a realized day: the
purchase and dump decisions for that day's scenario are applied as-is and
the battery trajectory is recomputed forward from the initial level via
the balance equation, then certified against capacity and the terminal
condition. Replaying the scenario used at solve time therefore reproduces
the optimizer's own trajectory and cost.

The baseline scheme never schedules the battery: it holds a constant
level, buys whatever consumption exceeds renewable supply each period,
and dumps the rest.

Sweeps re-solve the program across parameter grids and return fixed-schema
reports; simulation-driven sweeps share one seed across grid points so
traffic realizations are coupled and the documented monotone trends hold
exactly per run, not just in expectation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from importlib import metadata

import numpy as np

from .calibration import Calibration
from .power_model import consumption_trace
from .scenarios import CompositeScenario, MarginalScenario, MarginalSpace, compose
from .stochastic import (InfeasibleProgramError, PolicyTable,
                         per_scenario_decomposition)
from .traffic import CacConfig, TrafficSpec, simulate_replicated, uniform_traffic
from .units import Horizon

DAYS_PER_MONTH = 30


class ReplayError(RuntimeError):
    """A replayed schedule violated storage bounds or the terminal level."""


@dataclass(frozen=True)
class RealizedDay:
    """One realized set of traces; a scenario stripped of its probability."""

    label: str
    price: np.ndarray
    renewable: np.ndarray
    consumption: np.ndarray

    def __post_init__(self):
        for name in ("price", "renewable", "consumption"):
            trace = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            object.__setattr__(self, name, trace)
            if np.any(trace < 0):
                raise ValueError(f"{name} trace has negative values")
        if not (self.price.size == self.renewable.size == self.consumption.size):
            raise ValueError("realized traces must have equal length")

    @classmethod
    def from_scenario(cls, scenario: CompositeScenario) -> "RealizedDay":
        return cls(label=scenario.label, price=scenario.price,
                   renewable=scenario.renewable, consumption=scenario.consumption)


@dataclass(frozen=True)
class EvaluationResult:
    cost_cents: float
    purchase: np.ndarray
    battery: np.ndarray
    excess: np.ndarray


def evaluate_policy(policy: PolicyTable, day: RealizedDay,
                    tol: float = 1e-6) -> EvaluationResult:
    """Replay the day's scheduled purchases/dumps; recompute the battery path."""
    w = policy.scenario_index(day.label)
    x = policy.purchase[w]
    y = policy.excess[w]
    T = x.size
    if day.price.size != T:
        raise ValueError(f"day has {day.price.size} periods, policy has {T}")
    storage = policy.storage
    keep = 1.0 - storage.self_discharge if policy.physical_discharge else 1.0
    s = np.empty(T)
    s[0] = storage.initial
    for t in range(T - 1):
        s[t + 1] = keep * s[t] + x[t] + day.renewable[t] - day.consumption[t] - y[t]
    if np.any(s < -tol) or np.any(s > storage.capacity + tol):
        raise ReplayError(
            f"battery path leaves [0, {storage.capacity}] on day {day.label!r} "
            f"(range {s.min():.6f}..{s.max():.6f})")
    if abs(s[T - 1] - storage.terminal) > tol:
        raise ReplayError(
            f"terminal level {s[T - 1]:.6f} != {storage.terminal} on day {day.label!r}")
    cost = float(x @ day.price / 1000.0 + storage.loss_cost_coeff * s.sum())
    return EvaluationResult(cost_cents=cost, purchase=x.copy(), battery=s,
                            excess=y.copy())


def baseline_policy(horizon: Horizon, storage, day: RealizedDay,
                    hold_level: float = 1000.0) -> float:
    """Cost in cents of the no-scheduling scheme: constant battery level,
    grid purchase only when renewable falls short, surplus dumped."""
    if day.price.size != horizon.T:
        raise ValueError(f"day has {day.price.size} periods, horizon has {horizon.T}")
    level = min(hold_level, storage.capacity)
    purchase = np.maximum(0.0, day.consumption - day.renewable)
    return float(purchase @ day.price / 1000.0
                 + storage.loss_cost_coeff * level * horizon.T)


def monthly_cost(expected_daily_cost: float) -> float:
    """Dollars per month from an expected daily cost in cents."""
    if expected_daily_cost < 0:
        raise ValueError(f"cost must be non-negative, got {expected_daily_cost}")
    return expected_daily_cost * DAYS_PER_MONTH / 100.0


# ---------------------------------------------------------------------------
# Experiment reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentReport:
    kind: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row {row} does not match columns {self.columns}")
        first = [row[0] for row in self.rows]
        if any(b < a for a, b in zip(first, first[1:])):
            raise ValueError("sweep parameter column must be non-decreasing")

    def column_values(self, name: str) -> list:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def csv_text(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(_format_cell(v) for v in row))
        return "\n".join(lines) + "\n"


def _format_cell(v) -> str:
    if v is None:
        return "nan"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.6f}"


def manifest_text(config_hash: str, seed: int) -> str:
    """Run provenance: config digest, seed, package version. No timestamps,
    so reruns of the same configuration are byte-identical."""
    try:
        version = metadata.version("bspower")
    except metadata.PackageNotFoundError:
        version = "unknown"
    return (f"config_sha256: {config_hash}\n"
            f"seed: {seed}\n"
            f"package: bspower {version}\n")


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

def _scaled_renewable(space: MarginalSpace, factor: float) -> MarginalSpace:
    return MarginalSpace(kind="renewable", scenarios=tuple(
        MarginalScenario(s.label, s.probability, s.values * factor)
        for s in space.scenarios))


def _single_consumption(values: np.ndarray) -> MarginalSpace:
    return MarginalSpace(kind="consumption", scenarios=(
        MarginalScenario("simulated", 1.0, values),))


def sweep_battery(capacities, renewable_scalings, cal: Calibration,
                  seed: int = 0) -> ExperimentReport:
    """Expected monthly cost over a (capacity, renewable scale) grid.

    Initial/terminal levels are clamped to the capacity under test.
    Infeasible cells are reported as NaN rather than aborting the sweep.
    """
    if not len(capacities) or not len(renewable_scalings):
        raise ValueError("sweep grids must be non-empty")
    capacities = sorted(float(c) for c in capacities)
    consumption = cal.consumption_space(seed)
    spaces = {
        scale: compose(cal.price, _scaled_renewable(cal.renewable, scale), consumption)
        for scale in renewable_scalings
    }
    rows = []
    for cap in capacities:
        storage = replace(cal.storage, capacity=cap,
                          initial=min(cal.storage.initial, cap),
                          terminal=min(cal.storage.terminal, cap))
        for scale in renewable_scalings:
            try:
                policy = per_scenario_decomposition(cal.horizon, storage, spaces[scale])
                cost = monthly_cost(policy.expected_cost)
            except InfeasibleProgramError:
                cost = float("nan")
            rows.append((cap, float(scale), cost))
    return ExperimentReport(
        kind="battery",
        columns=("capacity_wh", "renewable_scale", "monthly_cost_usd"),
        rows=tuple(rows))


def sweep_cac(thresholds, spec: TrafficSpec, cal: Calibration,
              seed: int = 0) -> ExperimentReport:
    """QoS and cost saving across admission thresholds under one load.

    All thresholds share the seed, so blocking is non-increasing and
    dropping non-decreasing along the grid by construction. Saving is
    relative to no admission reservation (threshold = channels).
    """
    if not len(thresholds):
        raise ValueError("threshold grid must be non-empty")
    thresholds = sorted(int(t) for t in thresholds)
    channels = cal.cac.channels
    if thresholds[0] < 1 or thresholds[-1] > channels:
        raise ValueError(f"thresholds must lie in [1, {channels}]")

    def solve_for(cac: CacConfig):
        trace, stats = simulate_replicated(spec, cac, cal.horizon,
                                           cal.replications, seed)
        consumption = consumption_trace(cal.params, trace, cal.horizon)
        space = compose(cal.price, cal.renewable, _single_consumption(consumption))
        policy = per_scenario_decomposition(cal.horizon, cal.storage, space)
        return stats, policy.expected_cost

    _, cost_open = solve_for(CacConfig(channels=channels, threshold=channels))
    rows = []
    for tau in thresholds:
        stats, cost = solve_for(CacConfig(channels=channels, threshold=tau))
        saving = 100.0 * (cost_open - cost) / cost_open if cost_open > 0 else 0.0
        rows.append((tau, stats.new_blocking_prob, stats.handoff_dropping_prob,
                     saving))
    return ExperimentReport(
        kind="cac",
        columns=("threshold", "blocking", "dropping", "cost_saving_pct"),
        rows=tuple(rows))


def sweep_arrival_rate(rates, cal: Calibration, seed: int = 0) -> ExperimentReport:
    """Average purchased energy and battery level across uniform loads.

    Rates share the seed; occupancy is then pointwise non-decreasing in
    the rate, and so are consumption and the reported averages.
    """
    if not len(rates):
        raise ValueError("rate grid must be non-empty")
    rates = sorted(float(r) for r in rates)
    if rates[0] < 0:
        raise ValueError("arrival rates must be non-negative")
    rows = []
    for rate in rates:
        spec = uniform_traffic(rate, cal.handoff_fraction, cal.horizon.T,
                               cal.mean_holding)
        trace, _ = simulate_replicated(spec, cal.cac, cal.horizon,
                                       cal.replications, seed)
        consumption = consumption_trace(cal.params, trace, cal.horizon)
        space = compose(cal.price, cal.renewable, _single_consumption(consumption))
        policy = per_scenario_decomposition(cal.horizon, cal.storage, space)
        probs = policy.probabilities
        avg_purchase = float(probs @ policy.purchase.mean(axis=1))
        avg_battery = float(probs @ policy.battery.mean(axis=1))
        rows.append((rate, avg_purchase, avg_battery))
    return ExperimentReport(
        kind="arrival",
        columns=("arrival_rate_per_min", "avg_purchase_wh", "avg_battery_wh"),
        rows=tuple(rows))
