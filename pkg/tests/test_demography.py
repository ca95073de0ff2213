import numpy as np
import pytest

from panda_sim.config import DemographyRates
from panda_sim.demography import (
    Business,
    DomainError,
    Household,
    Individual,
    Population,
    household_labor,
    household_type,
    labor_units,
    step_demography,
)


def make_population(n_households: int = 10, members: int = 3,
                    base_age: int = 30) -> Population:
    pop = Population()
    for _ in range(n_households):
        hh = pop.new_household(businesses={Business.AGRICULTURE})
        for m in range(members):
            ind = pop.new_individual(
                age=base_age + m, sex="F" if m == 0 else "M",
                education_years=6,
                marital_status="married" if m < 2 else "single",
                household_id=hh.id,
            )
            hh.member_ids.append(ind.id)
    return pop


def test_zero_rates_only_age():
    pop = make_population(10)
    zero = DemographyRates(0, 0, 0, 0, 0)
    before = {i: ind.age for i, ind in pop.individuals.items()}
    households_before = set(pop.households)
    step_demography(pop, zero, np.random.default_rng(0))
    assert set(pop.households) == households_before
    assert all(pop.individuals[i].age == age + 1 for i, age in before.items())


def test_certain_death_empties_population():
    pop = make_population(5)
    rates = DemographyRates(death_rate_under_60=1.0, death_rate_60_plus=1.0,
                            birth_rate=0.0, marriage_rate=0.0,
                            out_migration_rate=0.0)
    step_demography(pop, rates, np.random.default_rng(0))
    assert pop.size() == 0
    assert len(pop.households) == 0


def test_one_step_growth_matches_bernoulli_expectation():
    """Mean net change over 30 replicates stays within 3 sigma of the exact
    Bernoulli expectation computed from the initial composition."""
    rates = DemographyRates()
    deltas = []
    expected = None
    variance = None
    for rep in range(30):
        pop = make_population(100, members=4, base_age=28)
        if expected is None:
            people = list(pop.individuals.values())
            p_death = [rates.death_rate_under_60 if ind.age + 1 < 60
                       else rates.death_rate_60_plus for ind in people]
            mothers = [ind for ind in people if ind.sex == "F"
                       and ind.marital_status == "married" and 20 <= ind.age + 1 <= 45]
            survive = {}
            for ind, pd in zip(people, p_death):
                survive[ind.id] = 1 - pd
            p_events = []
            # deaths and migrations remove; births add
            for ind, pd in zip(people, p_death):
                p_events.append((-1.0, pd))
                adult = ind.age + 1 >= 18
                if adult:
                    p_events.append((-1.0, (1 - pd) * rates.out_migration_rate))
            for mother in mothers:
                pd = rates.death_rate_under_60
                p_events.append((1.0, (1 - pd) * rates.birth_rate))
            expected = sum(sign * p for sign, p in p_events)
            variance = sum(p * (1 - p) for _, p in p_events)
        size0 = pop.size()
        step_demography(pop, rates, np.random.default_rng(1000 + rep))
        deltas.append(pop.size() - size0)
    sigma = (variance / 30) ** 0.5
    assert abs(np.mean(deltas) - expected) <= 3 * sigma + 1e-9


def test_membership_is_conserved():
    pop = make_population(40, members=4, base_age=24)
    rates = DemographyRates(marriage_rate=0.5, birth_rate=0.2)
    rng = np.random.default_rng(5)
    for _ in range(10):
        step_demography(pop, rates, rng)
        total = sum(len(hh.member_ids) for hh in pop.households.values())
        assert total == pop.size()


def test_marriage_spins_off_household_and_splits_land():
    pop = Population()
    parent = pop.new_household(businesses={Business.AGRICULTURE})
    parent.farm_cells = [(0, i) for i in range(4)]
    groom = pop.new_individual(age=25, sex="M", education_years=9,
                               marital_status="single", household_id=parent.id)
    parent.member_ids.append(groom.id)
    other = pop.new_household(businesses={Business.AGRICULTURE})
    bride = pop.new_individual(age=24, sex="F", education_years=9,
                               marital_status="single", household_id=other.id)
    other.member_ids.append(bride.id)
    rates = DemographyRates(marriage_rate=1.0, birth_rate=0, out_migration_rate=0,
                            death_rate_under_60=0, death_rate_60_plus=0)
    step_demography(pop, rates, np.random.default_rng(2))
    assert groom.marital_status == "married"
    new_hh = pop.households[groom.household_id]
    assert new_hh.id not in (parent.id, other.id)
    assert bride.household_id == new_hh.id
    assert len(parent.farm_cells) == 2 and len(new_hh.farm_cells) == 2


def test_determinism_under_seed():
    rates = DemographyRates(marriage_rate=0.3, birth_rate=0.1)
    runs = []
    for _ in range(2):
        pop = make_population(25, members=4, base_age=22)
        rng = np.random.default_rng(77)
        for _ in range(5):
            step_demography(pop, rates, rng)
        runs.append(sorted((i.id, i.age, i.household_id, i.marital_status)
                           for i in pop.individuals.values()))
    assert runs[0] == runs[1]


def test_labor_units_bands():
    assert labor_units(16) == 1.0
    assert labor_units(65) == 1.0
    assert labor_units(66) == 0.5
    assert labor_units(75) == 0.5
    assert labor_units(15) == 0.0
    assert labor_units(76) == 0.0


def test_household_labor_sums_members():
    pop = make_population(1, members=3, base_age=30)  # ages 30, 31, 32
    hh = next(iter(pop.households.values()))
    assert household_labor(pop, hh) == 3.0


@pytest.mark.parametrize("businesses,expected", [
    ({Business.AGRICULTURE}, 1),
    ({Business.AGRICULTURE, Business.TEMP_JOB}, 2),
    ({Business.AGRICULTURE, Business.TEMP_JOB, Business.LODGING}, 3),
])
def test_household_type_mapping(businesses, expected):
    hh = Household(id=0, businesses=businesses)
    assert household_type(hh) == expected


def test_household_type_requires_business():
    with pytest.raises(DomainError):
        household_type(Household(id=0, businesses=set()))
