import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from panda_sim.config import CarbonFactors, EnergyCoefficients
from panda_sim.demography import DomainError
from panda_sim.energy import (
    carbon_footprint,
    energy_expenditure,
    household_energy_profile,
    split_energy,
    total_electricity_demand,
    total_energy_demand,
)

UNIT = EnergyCoefficients(demand_unit_scale=1.0)


def test_tend_worked_example_type1():
    # 6.069 + 0.205 + 0.050 + 0.009 = 6.333
    value = total_energy_demand(1, 1.0, 1, UNIT)
    assert value == pytest.approx(10 ** 6.333, rel=1e-12)


def test_tend_constant_only():
    coeffs = EnergyCoefficients(demand_unit_scale=1.0, tend_household_type=0.0,
                                tend_room_area=0.0, tend_rooms=0.0)
    assert total_energy_demand(1, 1.0, 1, coeffs) == pytest.approx(10 ** 6.069, rel=1e-12)


def test_tend_type3_hand_exponent():
    # 6.069 + 3*0.205 + 2*0.050 + 8*0.009 = 6.856
    value = total_energy_demand(3, 2.0, 8, UNIT)
    assert value == pytest.approx(10 ** 6.856, rel=1e-4)


def test_teld_worked_example():
    # 5.684 + 0.072 + 0.447 + 2*0.216 = 6.635 at the standard price
    value = total_electricity_demand(2, 1.0, True, 0.65, UNIT)
    assert value == pytest.approx(10 ** 6.635, rel=1e-12)


def test_all_eight_coefficients_pinned():
    c = EnergyCoefficients()
    assert (c.tend_constant, c.tend_household_type, c.tend_room_area, c.tend_rooms) \
        == (6.069, 0.205, 0.050, 0.009)
    assert (c.teld_constant, c.teld_room_area, c.teld_business, c.teld_household_type) \
        == (5.684, 0.072, 0.447, 0.216)
    assert c.log_base == 10.0


def test_zero_elasticity_ignores_price():
    a = total_electricity_demand(1, 1.0, False, 0.65, UNIT, elasticity=0.0)
    b = total_electricity_demand(1, 1.0, False, 0.10, UNIT, elasticity=0.0)
    assert a == b


def test_half_price_doubles_demand_at_unit_elasticity():
    base = total_electricity_demand(1, 1.0, False, 0.65, UNIT, elasticity=1.0)
    half = total_electricity_demand(1, 1.0, False, 0.325, UNIT, elasticity=1.0)
    assert half == pytest.approx(2 * base, rel=1e-12)


def test_teld_cap_applies():
    tend = total_energy_demand(1, 1.0, 1, UNIT)
    capped = total_electricity_demand(1, 1.0, True, 0.05, UNIT, tend_cap=tend)
    assert capped == tend


def test_demand_domain_errors():
    with pytest.raises(DomainError):
        total_energy_demand(4, 1.0, 1, UNIT)
    with pytest.raises(DomainError):
        total_energy_demand(1, 0.0, 1, UNIT)
    with pytest.raises(DomainError):
        total_energy_demand(1, 1.0, 0, UNIT)
    with pytest.raises(DomainError):
        total_electricity_demand(1, 1.0, False, 0.0, UNIT)


def test_split_worked_example():
    electricity, firewood = split_energy(9000.0, 4500.0)
    assert electricity == 4500.0
    assert firewood == pytest.approx(2000.0)


def test_split_full_electrification():
    electricity, firewood = split_energy(5000.0, 8000.0)
    assert electricity == 5000.0
    assert firewood == 0.0


def test_split_zero_demand():
    assert split_energy(0.0, 0.0) == (0.0, 0.0)


def test_carbon_worked_example():
    assert carbon_footprint(1000.0, 2000.0) == 1437.5 + 1920.0


def test_carbon_zero():
    assert carbon_footprint(0.0, 0.0) == 0.0


@settings(deadline=None, max_examples=100)
@given(f1=st.floats(0, 1e6), e1=st.floats(0, 1e6),
       f2=st.floats(0, 1e6), e2=st.floats(0, 1e6))
def test_carbon_linearity(f1, e1, f2, e2):
    factors = CarbonFactors()
    total = carbon_footprint(f1 + f2, e1 + e2, factors)
    parts = carbon_footprint(f1, e1, factors) + carbon_footprint(f2, e2, factors)
    assert total == pytest.approx(parts, rel=1e-12)


def test_expenditure_worked_example():
    cost, subsidy = energy_expenditure(10_000.0, 0.40, participant=True)
    assert cost == pytest.approx(4000.0)
    assert subsidy == pytest.approx(2500.0)


def test_expenditure_no_subsidy_at_standard_price():
    cost, subsidy = energy_expenditure(10_000.0, 0.65, participant=True)
    assert subsidy == 0.0
    assert cost == pytest.approx(6500.0)


def test_expenditure_non_participant_gets_no_subsidy():
    cost, subsidy = energy_expenditure(10_000.0, 0.05, participant=False)
    assert subsidy == 0.0
    assert cost == pytest.approx(6500.0)


def test_expenditure_domain():
    with pytest.raises(DomainError):
        energy_expenditure(100.0, 0.70, participant=True)
    with pytest.raises(DomainError):
        energy_expenditure(-1.0, 0.40, participant=True)


@settings(deadline=None, max_examples=100)
@given(
    htype=st.integers(1, 3),
    rooms=st.integers(1, 10),
    lodging=st.booleans(),
    participant=st.booleans(),
    price_step=st.integers(1, 13),
)
def test_profile_energy_balance(htype, rooms, lodging, participant, price_step):
    price = round(0.05 * price_step, 2)
    profile = household_energy_profile(htype, rooms * 0.2, rooms, lodging,
                                       participant, price)
    assert profile.check_balance()
    assert profile.tend_kwh_eq >= 0
    assert profile.electricity_kwh >= 0
    assert profile.firewood_kg >= 0
    assert profile.electricity_cost >= 0
    assert profile.subsidy_paid >= 0
    if not participant:
        assert profile.subsidy_paid == 0.0


def test_f2e_inline_math_matches_public_functions():
    """The participation rule inlines the demand formulas; pin the equality."""
    from panda_sim.config import EconomyParams
    from panda_sim.demography import Business, Household
    from panda_sim.economy import decide_f2e_participation, f2e_switch_threshold

    energy = EnergyCoefficients()
    econ = EconomyParams()
    hh = Household(id=0, rooms=5, room_area_units=1.0,
                   businesses={Business.AGRICULTURE, Business.TEMP_JOB})
    hh.productivity_draw = 1.0
    hh.f2e_draw = 1.0
    hh.risk_attitude = 0.4
    tend = total_energy_demand(2, 1.0, 5, energy)
    teld = total_electricity_demand(2, 1.0, False, energy.standard_price, energy)
    replacement = max(0.0, tend - min(teld, tend))
    threshold = f2e_switch_threshold(hh, replacement / 2.25, econ)
    for price in (0.65, 0.45, 0.25, 0.05):
        expected = replacement * price <= threshold
        assert decide_f2e_participation(hh, price, energy, econ) == expected
        hh.f2e_participant = False
