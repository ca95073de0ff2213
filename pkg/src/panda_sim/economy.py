"""Household production planning and policy-participation decisions.

Business returns are linear with caps, so the greedy marginal-return
allocation is exactly optimal; leisure maximizers stop allocating once their
income floor is met. Participation rules compare policy prices against
household-specific reservation values built from a fixed lognormal
productivity/comfort draw, which makes the aggregate supply curves smooth.
Enrollment and F2E adoption are absorbing states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import (
    STANDARD_ELECTRICITY_PRICE,
    BusinessParams,
    EconomyParams,
    EnergyCoefficients,
)
from .demography import Business, DomainError, Household, Preference

LABOR_CHUNK = 1.0  # greedy allocation granularity, in labor-units


# (business, priority for deterministic ties) - agriculture first on equal rates
_TIE_ORDER = {Business.AGRICULTURE: 0, Business.LODGING: 1, Business.TEMP_JOB: 2}


@dataclass
class HouseholdPlan:
    labor_allocation: dict[Business, float] = field(default_factory=dict)
    cultivated_mu: float = 0.0
    expected_income: float = 0.0

    @property
    def businesses(self) -> set[Business]:
        return {b for b, units in self.labor_allocation.items() if units > 0}


def _options(household: Household,
             params: BusinessParams) -> list[tuple[float, int, Business, float]]:
    """(-rate, tie, business, labor cap) rows, ready to sort."""
    opts = []
    cultivable_mu = household.land_mu  # enrolled land cannot be cultivated
    if cultivable_mu > 0 and params.agriculture_labor_per_mu > 0:
        opts.append((
            -params.agriculture_return_per_mu / params.agriculture_labor_per_mu,
            _TIE_ORDER[Business.AGRICULTURE], Business.AGRICULTURE,
            cultivable_mu * params.agriculture_labor_per_mu,
        ))
    opts.append((-params.tempjob_return_per_labor, _TIE_ORDER[Business.TEMP_JOB],
                 Business.TEMP_JOB, params.tempjob_labor_cap))
    if (household.f2e_participant
            and household.capital >= params.lodging_capital_threshold
            and params.lodging_labor_per_room > 0):
        opts.append((
            -params.lodging_return_per_room / params.lodging_labor_per_room,
            _TIE_ORDER[Business.LODGING], Business.LODGING,
            household.rooms * params.lodging_labor_per_room,
        ))
    opts.sort()
    return opts


def decide_production(household: Household, labor: float, params: BusinessParams,
                      economy: EconomyParams, rng: np.random.Generator | None = None,
                      passive_income: float = 0.0) -> HouseholdPlan:
    """Greedy marginal-return labor allocation.

    Profit maximizers allocate until labor or caps bind. Leisure maximizers
    allocate in whole labor-unit chunks and stop as soon as expected income
    (including passive income such as program compensation) reaches the
    configured baseline. Zero labor yields an empty plan.
    """
    plan = HouseholdPlan()
    remaining = max(0.0, labor)
    leisure = household.preference is Preference.LEISURE_MAX
    income = 0.0
    for neg_rate, _, business, cap in _options(household, params):
        if remaining <= 1e-12:
            break
        if leisure and income + passive_income >= economy.baseline_income:
            break
        rate = -neg_rate
        if not leisure:
            alloc = min(remaining, cap)
            if alloc <= 1e-12:
                continue
        else:
            # whole labor-unit chunks until the income floor is reached
            alloc = 0.0
            while remaining - alloc > 1e-12 and cap - alloc > 1e-12:
                if income + alloc * rate + passive_income >= economy.baseline_income:
                    break
                alloc += min(LABOR_CHUNK, remaining - alloc, cap - alloc)
            if alloc <= 1e-12:
                continue
        plan.labor_allocation[business] = (
            plan.labor_allocation.get(business, 0.0) + alloc)
        income += alloc * rate
        remaining -= alloc
    agriculture_labor = plan.labor_allocation.get(Business.AGRICULTURE, 0.0)
    if params.agriculture_labor_per_mu > 0:
        plan.cultivated_mu = min(household.land_mu,
                                 agriculture_labor / params.agriculture_labor_per_mu)
    else:
        plan.cultivated_mu = household.land_mu if agriculture_labor > 0 else 0.0
    plan.expected_income = income
    return plan


def _ensure_draws(household: Household, sigma: float,
                  rng: np.random.Generator | None) -> None:
    if household.productivity_draw is None or household.f2e_draw is None:
        if rng is None:
            rng = np.random.default_rng(household.id)
        if household.productivity_draw is None:
            household.productivity_draw = float(np.exp(rng.normal(0.0, sigma)))
        if household.f2e_draw is None:
            household.f2e_draw = float(np.exp(rng.normal(0.0, sigma)))


def g2g_reservation_price(household: Household, economy: EconomyParams) -> float:
    """Per-Mu compensation at which the household is willing to revert land."""
    assert household.productivity_draw is not None
    return (economy.g2g_opportunity_profit_per_mu
            * (1.0 + household.risk_attitude * economy.risk_premium)
            * household.productivity_draw)


def decide_g2g_participation(household: Household, compensation: float,
                             economy: EconomyParams,
                             rng: np.random.Generator | None = None) -> float:
    """Newly enrolled Mu this year (0 if the reservation price is not met).

    The per-household productivity draw is fixed at first use, so every owned
    1-Mu parcel shares one reservation price and enrollment is all-or-nothing.
    Enrollment is durable; already-enrolled land never returns.
    """
    if compensation < 0:
        raise DomainError("compensation must be non-negative")
    _ensure_draws(household, economy.productivity_sigma, rng)
    if household.land_mu <= 0:
        return 0.0
    if compensation >= g2g_reservation_price(household, economy):
        return household.land_mu
    return 0.0


def f2e_switch_threshold(household: Household, firewood_kg: float,
                         economy: EconomyParams) -> float:
    """Imputed annual cost of collecting `firewood_kg`, scaled by comfort."""
    assert household.f2e_draw is not None
    imputed = (firewood_kg * economy.collection_hours_per_kg
               * economy.opportunity_wage_per_hour)
    comfort = household.f2e_draw / (1.0 + household.risk_attitude * economy.risk_premium)
    return imputed * economy.f2e_cost_margin * comfort


def decide_f2e_participation(household: Household, subsidized_price: float,
                             energy: EnergyCoefficients, economy: EconomyParams,
                             rng: np.random.Generator | None = None) -> bool:
    """Adopt when electrifying the firewood share of demand at the subsidized
    price costs no more than the imputed labor of collecting it.

    Adoption persists once made. The comparison uses the household's current
    demand profile evaluated at the standard tariff.
    """
    if not 0.0 < subsidized_price <= STANDARD_ELECTRICITY_PRICE + 1e-12:
        raise DomainError(
            f"subsidized price must be in (0, {STANDARD_ELECTRICITY_PRICE}] CNY/kWh"
        )
    if household.f2e_participant:
        return True
    _ensure_draws(household, economy.productivity_sigma, rng)
    htype = min(max(len(household.businesses), 1), 3)
    lodging = Business.LODGING in household.businesses
    # inline of total_energy_demand / total_electricity_demand at the standard
    # tariff (elasticity factor 1); equality is pinned by a unit test
    c = energy
    tend = c.demand_unit_scale * c.log_base ** (
        c.tend_constant + c.tend_household_type * htype
        + c.tend_room_area * household.room_area_units + c.tend_rooms * household.rooms)
    teld = c.demand_unit_scale * c.log_base ** (
        c.teld_constant + c.teld_room_area * household.room_area_units
        + c.teld_business * (1 if lodging else 0) + c.teld_household_type * htype)
    replacement_kwh = tend - teld if teld < tend else 0.0
    firewood_kg = replacement_kwh / energy.kwh_per_kg_firewood
    electric_cost = replacement_kwh * subsidized_price
    return electric_cost <= f2e_switch_threshold(household, firewood_kg, economy)


def household_income(plan: HouseholdPlan, compensation_received: float,
                     electricity_cost: float) -> float:
    """Business income plus program compensation minus energy spending."""
    return plan.expected_income + compensation_received - electricity_cost
