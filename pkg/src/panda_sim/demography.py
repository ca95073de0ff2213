"""Individuals, households, and the annual lifecycle step.

Individuals age, are born, die, marry and out-migrate with configured annual
probabilities; marriage spins a new household off the groom's parent household
and splits its land when the parent holds more than two Mu. Labor is derived
from member ages (1.0 unit for 16-65, 0.5 for 66-75).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import MU_PER_CELL, DemographyRates


class Preference(Enum):
    PROFIT_MAX = "profit_max"
    LEISURE_MAX = "leisure_max"


class Business(Enum):
    AGRICULTURE = "agriculture"
    TEMP_JOB = "temp_job"
    LODGING = "lodging"


class DomainError(ValueError):
    """A value outside an operation's stated domain."""


MARRIAGE_MIN_AGE = 20
ADULT_AGE = 18
LABOR_FULL = (16, 65)
LABOR_HALF = (66, 75)
FERTILE = (20, 45)


@dataclass
class Individual:
    id: int
    age: int
    sex: str                      # 'F' or 'M'
    education_years: int
    marital_status: str           # 'single' or 'married'
    household_id: int


@dataclass
class Household:
    id: int
    member_ids: list[int] = field(default_factory=list)
    capital: float = 0.0
    preference: Preference = Preference.PROFIT_MAX
    risk_attitude: float = 0.0            # 0 risk-neutral .. 1 most averse
    rooms: int = 4
    room_area_units: float = 0.8          # area of rooms in 100 m^2 units
    businesses: set[Business] = field(default_factory=set)
    g2g_enrolled_mu: float = 0.0
    f2e_participant: bool = False
    # farmland cells owned on the raster; land_mu derives from these plus
    # any already-enrolled (reverted) area
    farm_cells: list[tuple[int, int]] = field(default_factory=list)
    settlement: tuple[int, int] = (0, 0)
    productivity_draw: float | None = None
    f2e_draw: float | None = None

    @property
    def land_mu(self) -> float:
        """Unenrolled farmland still owned, in Mu."""
        return len(self.farm_cells) * MU_PER_CELL

    @property
    def total_land_mu(self) -> float:
        return self.land_mu + self.g2g_enrolled_mu


@dataclass
class Population:
    individuals: dict[int, Individual] = field(default_factory=dict)
    households: dict[int, Household] = field(default_factory=dict)
    next_individual_id: int = 0
    next_household_id: int = 0

    def new_individual(self, **kwargs) -> Individual:
        ind = Individual(id=self.next_individual_id, **kwargs)
        self.next_individual_id += 1
        self.individuals[ind.id] = ind
        return ind

    def new_household(self, **kwargs) -> Household:
        hh = Household(id=self.next_household_id, **kwargs)
        self.next_household_id += 1
        self.households[hh.id] = hh
        return hh

    def members(self, household: Household) -> list[Individual]:
        return [self.individuals[i] for i in household.member_ids]

    def size(self) -> int:
        return len(self.individuals)

    def copy(self) -> "Population":
        dup = Population(next_individual_id=self.next_individual_id,
                         next_household_id=self.next_household_id)
        dup.individuals = {
            i: Individual(ind.id, ind.age, ind.sex, ind.education_years,
                          ind.marital_status, ind.household_id)
            for i, ind in self.individuals.items()
        }
        dup.households = {
            h: Household(
                id=hh.id, member_ids=list(hh.member_ids), capital=hh.capital,
                preference=hh.preference, risk_attitude=hh.risk_attitude,
                rooms=hh.rooms, room_area_units=hh.room_area_units,
                businesses=set(hh.businesses),
                g2g_enrolled_mu=hh.g2g_enrolled_mu,
                f2e_participant=hh.f2e_participant,
                farm_cells=list(hh.farm_cells), settlement=hh.settlement,
                productivity_draw=hh.productivity_draw, f2e_draw=hh.f2e_draw,
            )
            for h, hh in self.households.items()
        }
        return dup

    def check_invariants(self) -> None:
        counted = 0
        for hh in self.households.values():
            for mid in hh.member_ids:
                ind = self.individuals.get(mid)
                assert ind is not None, f"household {hh.id} lists missing member {mid}"
                assert ind.household_id == hh.id
            counted += len(hh.member_ids)
        assert counted == len(self.individuals), "orphan individuals exist"


def labor_units(age: int) -> float:
    if LABOR_FULL[0] <= age <= LABOR_FULL[1]:
        return 1.0
    if LABOR_HALF[0] <= age <= LABOR_HALF[1]:
        return 0.5
    return 0.0


def household_labor(population: Population, household: Household) -> float:
    return sum(labor_units(ind.age) for ind in population.members(household))


def household_type(household: Household) -> int:
    """Business-count proxy: 1 business -> 1, 2 -> 2, three or more -> 3."""
    n = len(household.businesses)
    if n == 0:
        raise DomainError("household has no businesses; type undefined")
    return min(n, 3)


def _remove_individual(population: Population, ind: Individual) -> None:
    hh = population.households[ind.household_id]
    hh.member_ids.remove(ind.id)
    del population.individuals[ind.id]


def _spin_off_household(population: Population, groom: Individual, bride: Individual,
                        rng: np.random.Generator) -> Household:
    parent = population.households[groom.household_id]
    new_hh = population.new_household(
        capital=parent.capital * 0.25,
        preference=parent.preference,
        risk_attitude=float(rng.uniform()),
        rooms=int(rng.integers(2, 5)),
        businesses={Business.AGRICULTURE},
        settlement=parent.settlement,
        productivity_draw=None,       # drawn on first policy decision
        f2e_draw=None,
    )
    new_hh.room_area_units = new_hh.rooms * 0.2
    parent.capital -= new_hh.capital
    # Land split: half the parent's unenrolled parcels when it holds > 2 Mu.
    if parent.land_mu > 2.0:
        k = len(parent.farm_cells) // 2
        new_hh.farm_cells = parent.farm_cells[:k]
        parent.farm_cells = parent.farm_cells[k:]
    for person in (groom, bride):
        old = population.households[person.household_id]
        old.member_ids.remove(person.id)
        person.household_id = new_hh.id
        new_hh.member_ids.append(person.id)
    return new_hh


def step_demography(population: Population, rates: DemographyRates,
                    rng: np.random.Generator) -> Population:
    """One simulated year of aging, deaths, births, marriages and migration.

    Mutates and returns the population; deterministic for a fixed rng state.
    Iteration is in ascending id order so replicate streams are reproducible.
    """
    # Aging first: every survivor is exactly one year older.
    for ind in population.individuals.values():
        ind.age += 1

    # Deaths (age-banded hazard); one batched draw per pass keeps the stream
    # deterministic and cheap.
    people = sorted(population.individuals.values(), key=lambda i: i.id)
    draws = rng.random(len(people))
    for ind, u in zip(people, draws):
        hazard = (rates.death_rate_under_60 if ind.age < 60
                  else rates.death_rate_60_plus)
        if u < hazard:
            _remove_individual(population, ind)

    # Births to married women of fertile age.
    mothers = [ind for ind in sorted(population.individuals.values(),
                                     key=lambda i: i.id)
               if ind.sex == "F" and ind.marital_status == "married"
               and FERTILE[0] <= ind.age <= FERTILE[1]]
    draws = rng.random(len(mothers))
    for mother, u in zip(mothers, draws):
        if u < rates.birth_rate:
            child = population.new_individual(
                age=0, sex="F" if rng.random() < 0.5 else "M",
                education_years=0, marital_status="single",
                household_id=mother.household_id,
            )
            population.households[mother.household_id].member_ids.append(child.id)

    # Marriages pair eligible singles; each new couple founds a household.
    eligible = sorted((ind for ind in population.individuals.values()
                       if ind.marital_status == "single"
                       and ind.age >= MARRIAGE_MIN_AGE), key=lambda i: i.id)
    draws = rng.random(len(eligible))
    proposers = [ind for ind, u in zip(eligible, draws)
                 if u < rates.marriage_rate]
    brides = [i for i in proposers if i.sex == "F"]
    grooms = [i for i in proposers if i.sex == "M"]
    for groom, bride in zip(grooms, brides):
        groom.marital_status = "married"
        bride.marital_status = "married"
        _spin_off_household(population, groom, bride, rng)

    # Out-migration removes adults from the system.
    people = sorted(population.individuals.values(), key=lambda i: i.id)
    draws = rng.random(len(people))
    for ind, u in zip(people, draws):
        if ind.age >= ADULT_AGE and u < rates.out_migration_rate:
            spouse_hh = population.households[ind.household_id]
            _remove_individual(population, ind)
            # A left-behind spouse reverts to single for bookkeeping.
            for mid in spouse_hh.member_ids:
                other = population.individuals[mid]
                if other.marital_status == "married" and abs(other.age - ind.age) < 15:
                    other.marital_status = "single"
                    break

    # Emptied households dissolve; their unenrolled land leaves play.
    for hid in [h.id for h in population.households.values() if not h.member_ids]:
        del population.households[hid]

    population.check_invariants()
    return population
