"""Canonical units and the decision-horizon clock.

Conventions used throughout the package:

  power   -> watts (W)
  energy  -> watt-hours (Wh)
  price   -> cents per kWh
  cost    -> cents (converted to dollars only for display)

With the default one-hour period, a constant power of p W over one period
equals p Wh of energy, so all per-period balance arithmetic is done in Wh.
Nameplate figures quoted in kW are read as Wh of stored energy (a "2 kW"
battery holds 2000 Wh).
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Horizon:
    """Decision horizon: T periods of equal length in hours."""

    T: int
    period_hours: float = 1.0

    def __post_init__(self):
        if self.T < 2:
            raise ValueError(f"horizon needs at least 2 periods, got T={self.T}")
        if self.period_hours <= 0:
            raise ValueError(f"period_hours must be positive, got {self.period_hours}")

    @property
    def period_minutes(self) -> float:
        return self.period_hours * 60.0


def energy_cost(energy_wh: float, price_cents_per_kwh: float) -> float:
    """Cost in cents of buying ``energy_wh`` at ``price_cents_per_kwh``.

    Linear in both arguments; the 1/1000 factor bridges Wh to kWh.
    """
    if energy_wh < 0:
        raise ValueError(f"energy must be non-negative, got {energy_wh}")
    if price_cents_per_kwh < 0:
        raise ValueError(f"price must be non-negative, got {price_cents_per_kwh}")
    return energy_wh * price_cents_per_kwh / 1000.0


def cents_to_dollars(cents: float) -> float:
    return cents / 100.0
