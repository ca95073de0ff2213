"""Household energy demand, the electricity/firewood split, costs and carbon.

Total energy demand (TEND) and total electricity demand (TELD) come from
log-linear regressions on household type, room area and room count; whatever
electricity does not cover is met by firewood at 2.25 kWh per kg. The demand
response to the subsidized tariff is a power law around the standard price
(the regression itself carries no price term). Carbon is the exact linear
combination of the two emission factors.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import STANDARD_ELECTRICITY_PRICE, CarbonFactors, EnergyCoefficients
from .demography import DomainError


@dataclass
class EnergyProfile:
    """One household-year of energy accounting (all fields non-negative)."""

    tend_kwh_eq: float
    electricity_kwh: float
    firewood_kg: float
    electricity_cost: float
    subsidy_paid: float

    def check_balance(self, kwh_per_kg: float = 2.25, rel_tol: float = 1e-6) -> bool:
        total = self.electricity_kwh + kwh_per_kg * self.firewood_kg
        scale = max(abs(self.tend_kwh_eq), 1e-12)
        return abs(total - self.tend_kwh_eq) <= rel_tol * scale


def total_energy_demand(household_type: int, room_area_units: float, rooms: int,
                        coeffs: EnergyCoefficients | None = None) -> float:
    """TEND in kWh-equivalent per year.

    log(TEND) = 6.069 + 0.205*type + 0.050*room_area + 0.009*rooms, scaled to
    physical units by the configured demand_unit_scale.
    """
    c = coeffs or EnergyCoefficients()
    if household_type not in (1, 2, 3):
        raise DomainError(f"household_type must be 1, 2 or 3, got {household_type}")
    if rooms < 1:
        raise DomainError("rooms must be >= 1")
    if room_area_units <= 0:
        raise DomainError("room_area_units must be > 0")
    exponent = (c.tend_constant
                + c.tend_household_type * household_type
                + c.tend_room_area * room_area_units
                + c.tend_rooms * rooms)
    return c.demand_unit_scale * c.log_base ** exponent


def total_electricity_demand(household_type: int, room_area_units: float,
                             lodging: bool, subsidized_price: float,
                             coeffs: EnergyCoefficients | None = None,
                             elasticity: float | None = None,
                             tend_cap: float | None = None) -> float:
    """TELD in kWh per year, price-responsive and capped at TEND when given.

    log(TELD) = 5.684 + 0.072*room_area + 0.447*lodging + 0.216*type at the
    standard tariff; demand then scales by (price/standard)^-elasticity. The
    regression has no rooms term, so the TEND cap is passed in by the caller.
    """
    c = coeffs or EnergyCoefficients()
    if subsidized_price <= 0:
        raise DomainError("electricity price must be positive")
    if household_type not in (1, 2, 3):
        raise DomainError(f"household_type must be 1, 2 or 3, got {household_type}")
    eps = c.price_elasticity if elasticity is None else elasticity
    exponent = (c.teld_constant
                + c.teld_room_area * room_area_units
                + c.teld_business * (1 if lodging else 0)
                + c.teld_household_type * household_type)
    base = c.demand_unit_scale * c.log_base ** exponent
    demand = base * (subsidized_price / c.standard_price) ** (-eps)
    if tend_cap is not None:
        demand = min(demand, tend_cap)
    return demand


def split_energy(tend: float, teld: float,
                 kwh_per_kg: float = 2.25) -> tuple[float, float]:
    """Electricity covers demand up to TELD; firewood fills the remainder."""
    if tend < 0 or teld < 0:
        raise DomainError("demands must be non-negative")
    electricity = min(teld, tend)
    firewood_kg = (tend - electricity) / kwh_per_kg
    return electricity, firewood_kg


def carbon_footprint(total_firewood_kg: float, total_electricity_kwh: float,
                     factors: CarbonFactors | None = None) -> float:
    """Exact closed form: 1.4375*F + 0.96*E (kg CO2 per year)."""
    f = factors or CarbonFactors()
    if total_firewood_kg < 0 or total_electricity_kwh < 0:
        raise DomainError("quantities must be non-negative")
    return (f.firewood_kg_co2_per_kg * total_firewood_kg
            + f.electricity_kg_co2_per_kwh * total_electricity_kwh)


def energy_expenditure(electricity_kwh: float, subsidized_price: float,
                       participant: bool,
                       standard_price: float = STANDARD_ELECTRICITY_PRICE,
                       ) -> tuple[float, float]:
    """(household electricity cost, subsidy paid) for one household-year.

    Participants pay the subsidized tariff and the program covers the gap to
    the standard price; non-participants pay the standard tariff unsubsidized.
    """
    if not 0.0 < subsidized_price <= standard_price + 1e-12:
        raise DomainError("subsidized price must be in (0, standard_price]")
    if electricity_kwh < 0:
        raise DomainError("electricity must be non-negative")
    if participant:
        cost = electricity_kwh * subsidized_price
        subsidy = electricity_kwh * (standard_price - subsidized_price)
    else:
        cost = electricity_kwh * standard_price
        subsidy = 0.0
    return cost, subsidy


def household_energy_profile(household_type: int, room_area_units: float, rooms: int,
                             lodging: bool, participant: bool, subsidized_price: float,
                             coeffs: EnergyCoefficients | None = None) -> EnergyProfile:
    """Full demand/split/cost pipeline for one household-year."""
    c = coeffs or EnergyCoefficients()
    tend = total_energy_demand(household_type, room_area_units, rooms, c)
    price = subsidized_price if participant else c.standard_price
    teld = total_electricity_demand(household_type, room_area_units, lodging, price, c)
    teld = min(teld, tend)
    electricity, firewood = split_energy(tend, teld, c.kwh_per_kg_firewood)
    cost, subsidy = energy_expenditure(
        electricity, subsidized_price if participant else c.standard_price,
        participant, c.standard_price,
    )
    if not participant:
        subsidy = 0.0
    return EnergyProfile(
        tend_kwh_eq=tend, electricity_kwh=electricity, firewood_kg=firewood,
        electricity_cost=cost, subsidy_paid=subsidy,
    )
