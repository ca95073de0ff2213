"""Policy scenario space and per-year program accounting.

A scenario pairs one Grain-to-Green compensation level (CNY/Mu) with one
subsidized electricity price (CNY/kWh). The default lattice is 21 x 13 = 273
scenarios: compensation 0..2000 in steps of 100, price 0.65 down to 0.05 in
steps of 0.05. Price 0.65 means "no subsidy" and compensation 0 means "no
reverting program".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .config import STANDARD_ELECTRICITY_PRICE, ScenarioLattice
from .demography import Household
from .energy import EnergyProfile


@dataclass(frozen=True, order=True)
class PolicyScenario:
    g2g_compensation: float     # CNY per enrolled Mu per year
    f2e_price: float            # subsidized CNY/kWh, 0.65 = unsubsidized

    def label(self) -> str:
        return f"GG{self.g2g_compensation:g}/FE{self.f2e_price:.2f}"


@dataclass
class PolicyLedger:
    g2g_expenditure: float = 0.0
    f2e_subsidy: float = 0.0

    @property
    def financial_burden(self) -> float:
        return self.g2g_expenditure + self.f2e_subsidy


def g2g_levels(lattice: ScenarioLattice | None = None) -> list[float]:
    lat = lattice or ScenarioLattice()
    n = int(round((lat.g2g_max - lat.g2g_min) / lat.g2g_step)) + 1
    return [round(lat.g2g_min + i * lat.g2g_step, 6) for i in range(n)]


def f2e_levels(lattice: ScenarioLattice | None = None) -> list[float]:
    """Prices descending from the standard tariff."""
    lat = lattice or ScenarioLattice()
    n = int(round((lat.f2e_max - lat.f2e_min) / lat.f2e_step)) + 1
    return [round(lat.f2e_max - i * lat.f2e_step, 6) for i in range(n)]


def scenario_grid(lattice: ScenarioLattice | None = None) -> list[PolicyScenario]:
    """Full cross product, compensation ascending then price descending."""
    return [PolicyScenario(g, p)
            for g in g2g_levels(lattice) for p in f2e_levels(lattice)]


def settle_year(households: Iterable[Household], scenario: PolicyScenario,
                energy_profiles: dict[int, EnergyProfile]) -> PolicyLedger:
    """Aggregate the year's program spending across households.

    Compensation is paid annually per enrolled Mu; the electricity subsidy is
    the per-kWh gap to the standard price already accounted on each profile.
    """
    ledger = PolicyLedger()
    for hh in households:
        ledger.g2g_expenditure += scenario.g2g_compensation * hh.g2g_enrolled_mu
        profile = energy_profiles.get(hh.id)
        if profile is not None and hh.f2e_participant:
            ledger.f2e_subsidy += profile.subsidy_paid
    return ledger


def null_scenario() -> PolicyScenario:
    return PolicyScenario(0.0, STANDARD_ELECTRICITY_PRICE)
