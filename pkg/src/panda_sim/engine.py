"""Replicate year-loop, scenario batches, full sweeps, and sweep I/O.

A replicate advances the coupled system one year at a time in a fixed order:
demography, policy participation, production, energy, firewood trips,
landscape (succession + stock replenishment), habitat, indicators. The order
is a reproducibility convention; results are deterministic in
(config, scenario, seed).

Scenario batches average 30 replicates seeded as base_seed XOR replicate
index. Sweeps reuse the same base seed for every scenario (common random
numbers): demographic trajectories are policy-independent by construction, so
cross-scenario deltas are driven by the policies, not by resampled noise.
Per-scenario independent seeding is available via config.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import economy as econ_mod
from . import energy as energy_mod
from .config import RunConfig
from .demography import (
    Business,
    Household,
    Population,
    Preference,
    household_labor,
    step_demography,
)
from .firewood import (
    NoZoneError,
    PathTimeoutError,
    designate_zones,
    replenish_stocks,
    run_household_trip,
)
from .policy import PolicyScenario, scenario_grid, settle_year
from .worldgen import (
    Cover,
    HabitatWeights,
    Landscape,
    abandon_farmland,
    compute_habitat_quality,
    generate_world,
    step_succession,
)

SWEEP_FORMAT_VERSION = 1


class SweepFormatError(ValueError):
    """Malformed sweep CSV input."""


@dataclass
class YearlyIndicators:
    year: int
    reverted_area_mu: float = 0.0
    firewood_kg: float = 0.0
    electricity_kwh: float = 0.0
    g2g_expenditure: float = 0.0
    f2e_subsidy: float = 0.0
    financial_burden: float = 0.0
    carbon_kg: float = 0.0
    habitat_index: float = 0.0
    habitat_index_normalized: float = 0.0
    gross_revenue: float = 0.0
    gross_economic_benefits: float = 0.0


INDICATOR_FIELDS = [f.name for f in dataclasses.fields(YearlyIndicators)
                    if f.name != "year"]


@dataclass
class ReplicateResult:
    years: list[YearlyIndicators]
    balance_violations: int = 0
    # per-year list of (household_id, tend, electricity, firewood) when audited
    energy_audit: list[list[tuple[int, float, float, float]]] | None = None


@dataclass
class ScenarioResult:
    scenario: PolicyScenario
    years: list[int]
    per_year_mean: np.ndarray    # (n_years, n_fields) in INDICATOR_FIELDS order
    per_year_std: np.ndarray
    n_replicates: int
    balance_violations: int = 0

    def mean(self, year_index: int, fieldname: str) -> float:
        return float(self.per_year_mean[year_index, INDICATOR_FIELDS.index(fieldname)])

    def series(self, fieldname: str) -> np.ndarray:
        return self.per_year_mean[:, INDICATOR_FIELDS.index(fieldname)]


@dataclass
class SweepResult:
    results: dict[PolicyScenario, ScenarioResult]
    metadata: dict

    @property
    def scenarios(self) -> list[PolicyScenario]:
        return list(self.results.keys())


# ---------------------------------------------------------------------------
# Replicate state


# Pristine (landscape, population) snapshots are identical across scenarios
# for a given (config, seed) - common random numbers - so sweeps reuse them.
_STATE_CACHE: dict[tuple[str, int], tuple] = {}
_STATE_CACHE_MAX = 40


def _config_hash(config: RunConfig) -> str:
    memo = getattr(config, "_hash_memo", None)
    if memo is None:
        memo = config.config_hash()
        config._hash_memo = memo  # type: ignore[attr-defined]
    return memo


class Replicate:
    """Mutable state of one simulated world-and-society trajectory."""

    def __init__(self, config: RunConfig, scenario: PolicyScenario, seed: int):
        self.config = config
        self.scenario = scenario
        self.seed = seed
        ss = np.random.SeedSequence(entropy=[seed & 0xFFFFFFFF])
        world_ss, pop_ss, demo_ss, econ_ss, trip_ss = ss.spawn(5)
        self.demo_rng = np.random.default_rng(demo_ss)
        self.econ_rng = np.random.default_rng(econ_ss)
        self.trip_rng = random.Random(int(trip_ss.generate_state(1)[0]))
        self.weights = HabitatWeights.from_sequence(config.world.habitat_weights)

        key = (_config_hash(config), seed)
        cached = _STATE_CACHE.get(key)
        if cached is None:
            world_seed = int(world_ss.generate_state(1)[0])
            landscape = generate_world(config.world, world_seed)
            population = self._init_population(
                np.random.default_rng(pop_ss), landscape)
            year0 = compute_habitat_quality(landscape, self.weights).index
            if len(_STATE_CACHE) >= _STATE_CACHE_MAX:
                _STATE_CACHE.pop(next(iter(_STATE_CACHE)))
            _STATE_CACHE[key] = (landscape, population, year0)
            cached = _STATE_CACHE[key]
        pristine_landscape, pristine_population, year0 = cached
        self.landscape: Landscape = pristine_landscape.copy()
        self.population = pristine_population.copy()
        self.year0_habitat = year0

    def _init_population(self, rng: np.random.Generator,
                         landscape: Landscape) -> Population:
        cfg = self.config.population
        pop = Population()
        settlements = landscape.settlements or [(0, 0)]
        farm_rc = np.argwhere(landscape.cover == int(Cover.FARMLAND))
        # parcels sort by distance to the nearest settlement; ties by coordinate
        if len(farm_rc):
            anchors = np.asarray(settlements)
            d2 = ((farm_rc[:, None, :] - anchors[None, :, :]) ** 2).sum(axis=2).min(axis=1)
            order = np.lexsort((farm_rc[:, 1], farm_rc[:, 0], d2))
            farm_cells = [(int(r), int(c)) for r, c in farm_rc[order]]
        else:
            farm_cells = []
        households: list[Household] = []
        for i in range(cfg.n_households):
            hh = pop.new_household(
                capital=float(cfg.capital_median * np.exp(rng.normal(0.0, cfg.capital_sigma))),
                preference=(Preference.PROFIT_MAX
                            if rng.random() < cfg.profit_max_share
                            else Preference.LEISURE_MAX),
                risk_attitude=float(rng.uniform()),
                rooms=int(rng.integers(cfg.rooms_min, cfg.rooms_max + 1)),
                settlement=settlements[i % len(settlements)],
                businesses={Business.AGRICULTURE},
            )
            hh.room_area_units = hh.rooms * cfg.room_area_units_per_room
            hh.productivity_draw = float(np.exp(rng.normal(0.0, self.config.economy.productivity_sigma)))
            hh.f2e_draw = float(np.exp(rng.normal(0.0, self.config.economy.productivity_sigma)))
            households.append(hh)
            # founding couple plus a size draw of further members
            size = int(np.clip(rng.poisson(cfg.mean_household_size - 1) + 1, 1, 9))
            for m in range(size):
                if m < 2:
                    age = int(rng.integers(25, 56))
                    marital = "married" if size >= 2 else "single"
                    sex = "F" if m == 0 else "M"
                else:
                    age = int(rng.integers(0, 81))
                    marital = "single" if age < 25 else ("married" if rng.random() < 0.5 else "single")
                    sex = "F" if rng.random() < 0.5 else "M"
                ind = pop.new_individual(
                    age=age, sex=sex, education_years=int(rng.integers(0, 13)),
                    marital_status=marital, household_id=hh.id,
                )
                hh.member_ids.append(ind.id)
        # deal farmland parcels round-robin so every household starts with land
        for idx, cell in enumerate(farm_cells):
            households[idx % len(households)].farm_cells.append(cell)
        pop.check_invariants()
        return pop

    # -- one simulated year ------------------------------------------------

    def step_year(self, year_index: int, audit: bool = False):
        cfg = self.config
        scenario = self.scenario
        landscape = self.landscape
        pop = self.population

        step_demography(pop, cfg.demography, self.demo_rng)
        households = [pop.households[hid] for hid in sorted(pop.households)]

        # Policy participation (absorbing states).
        for hh in households:
            newly = econ_mod.decide_g2g_participation(
                hh, scenario.g2g_compensation, cfg.economy, self.econ_rng)
            if newly > 0:
                hh.g2g_enrolled_mu += newly
                abandon_farmland(landscape, hh.farm_cells)
                hh.farm_cells = []
            if not hh.f2e_participant and econ_mod.decide_f2e_participation(
                    hh, scenario.f2e_price, cfg.energy, cfg.economy, self.econ_rng):
                hh.f2e_participant = True

        # Production plans.
        plans = {}
        gross_revenue = 0.0
        for hh in households:
            labor = household_labor(pop, hh)
            passive = scenario.g2g_compensation * hh.g2g_enrolled_mu
            plan = econ_mod.decide_production(hh, labor, cfg.business, cfg.economy,
                                              passive_income=passive)
            hh.businesses = plan.businesses
            plans[hh.id] = plan
            gross_revenue += plan.expected_income

        # Energy demand and split.
        profiles = {}
        balance_violations = 0
        electricity_total = 0.0
        audit_rows = [] if audit else None
        for hh in households:
            htype = min(max(len(hh.businesses), 1), 3)
            lodging = Business.LODGING in hh.businesses
            profile = energy_mod.household_energy_profile(
                htype, hh.room_area_units, hh.rooms, lodging,
                hh.f2e_participant, scenario.f2e_price, cfg.energy)
            profiles[hh.id] = profile
            electricity_total += profile.electricity_kwh
            if not profile.check_balance(cfg.energy.kwh_per_kg_firewood):
                balance_violations += 1
            if audit_rows is not None:
                audit_rows.append((hh.id, profile.tend_kwh_eq,
                                   profile.electricity_kwh, profile.firewood_kg))

        # Firewood trips mutate the landscape sequentially in household order.
        age = landscape.disturbance_age
        age += 1
        np.minimum(age, np.iinfo(np.int32).max // 2, out=age)
        fw_params = cfg.firewood
        threshold = fw_params.resolved_threshold(cfg.world.forest_stock_kg)
        max_steps = fw_params.resolved_max_steps(landscape.width, landscape.height)
        zones = designate_zones(landscape, fw_params.block_size, threshold)
        firewood_collected = 0.0
        for hh in households:
            demand = profiles[hh.id].firewood_kg
            if demand <= 0.0:
                continue
            try:
                firewood_collected += run_household_trip(
                    landscape, zones, hh.settlement, demand, self.trip_rng,
                    max_steps, fw_params, hh.id)
            except (NoZoneError, PathTimeoutError):
                continue  # demand unmet this year
        # Active farmland counts as disturbed while cultivated.
        for hh in households:
            for r, c in hh.farm_cells:
                age[r, c] = 0

        step_succession(landscape)
        replenish_stocks(landscape, year_index)

        habitat = compute_habitat_quality(landscape, self.weights)
        ledger = settle_year(households, scenario, profiles)

        carbon = energy_mod.carbon_footprint(firewood_collected, electricity_total,
                                             cfg.carbon)
        reverted = sum(hh.g2g_enrolled_mu for hh in households)
        indicators = YearlyIndicators(
            year=cfg.start_year + year_index,
            reverted_area_mu=reverted,
            firewood_kg=firewood_collected,
            electricity_kwh=electricity_total,
            g2g_expenditure=ledger.g2g_expenditure,
            f2e_subsidy=ledger.f2e_subsidy,
            financial_burden=ledger.financial_burden,
            carbon_kg=carbon,
            habitat_index=habitat.index,
            habitat_index_normalized=habitat.index / self.year0_habitat
            if self.year0_habitat else 0.0,
            gross_revenue=gross_revenue,
            gross_economic_benefits=gross_revenue - ledger.financial_burden,
        )
        return indicators, balance_violations, audit_rows


def run_replicate(config: RunConfig, scenario: PolicyScenario, seed: int,
                  audit: bool = False,
                  disturbance_dump_dir: str | Path | None = None,
                  ) -> ReplicateResult:
    """Simulate one replicate over the configured horizon.

    `disturbance_dump_dir` is a debug hook writing one plain-text disturbance
    grid per simulated year.
    """
    rep = Replicate(config, scenario, seed)
    years = []
    violations = 0
    audit_log = [] if audit else None
    dump_dir = Path(disturbance_dump_dir) if disturbance_dump_dir else None
    if dump_dir is not None:
        dump_dir.mkdir(parents=True, exist_ok=True)
    for year_index in range(1, config.n_years + 1):
        indicators, bad, audit_rows = rep.step_year(year_index, audit=audit)
        years.append(indicators)
        violations += bad
        if audit_log is not None:
            audit_log.append(audit_rows)
        if dump_dir is not None:
            from .firewood import dump_disturbance_grid

            path = dump_dir / f"disturbance_{indicators.year}.txt"
            path.write_text(dump_disturbance_grid(rep.landscape))
    return ReplicateResult(years=years, balance_violations=violations,
                           energy_audit=audit_log)


def _indicator_matrix(years: list[YearlyIndicators]) -> np.ndarray:
    return np.array([[getattr(y, f) for f in INDICATOR_FIELDS] for y in years])


def replicate_seed(base_seed: int, index: int) -> int:
    return base_seed ^ index


def run_scenario(config: RunConfig, scenario: PolicyScenario,
                 n_replicates: int | None = None,
                 base_seed: int | None = None) -> ScenarioResult:
    """Average a scenario over replicates; order-independent by construction."""
    n = config.n_replicates if n_replicates is None else n_replicates
    if n < 1:
        raise ValueError("n_replicates must be >= 1")
    seed0 = config.base_seed if base_seed is None else base_seed
    if not config.common_random_numbers:
        seed0 = seed0 ^ hash((scenario.g2g_compensation, scenario.f2e_price)) & 0xFFFFFFF
    stack = []
    violations = 0
    years = None
    for rep_index in range(n):
        result = run_replicate(config, scenario, replicate_seed(seed0, rep_index))
        stack.append(_indicator_matrix(result.years))
        violations += result.balance_violations
        years = [y.year for y in result.years]
    data = np.stack(stack)
    return ScenarioResult(
        scenario=scenario, years=years or [],
        per_year_mean=data.mean(axis=0), per_year_std=data.std(axis=0),
        n_replicates=n, balance_violations=violations,
    )


def resolve_workers(explicit: int | None = None) -> int:
    if explicit is not None:
        return max(1, explicit)
    env = os.environ.get("PANDA_SIM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


def _scenario_task(args) -> tuple[PolicyScenario, ScenarioResult]:
    config, scenario, n_replicates, base_seed = args
    return scenario, run_scenario(config, scenario, n_replicates, base_seed)


def run_sweep(config: RunConfig, scenarios: list[PolicyScenario] | None = None,
              n_replicates: int | None = None, base_seed: int | None = None,
              workers: int | None = None) -> SweepResult:
    """Evaluate every scenario independently under common random numbers."""
    if scenarios is None:
        scenarios = scenario_grid(config.lattice)
    if not scenarios:
        raise ValueError("scenario list must be non-empty")
    n = config.n_replicates if n_replicates is None else n_replicates
    seed0 = config.base_seed if base_seed is None else base_seed
    nworkers = resolve_workers(workers)
    results: dict[PolicyScenario, ScenarioResult] = {}
    if nworkers == 1 or len(scenarios) == 1:
        for sc in scenarios:
            results[sc] = run_scenario(config, sc, n, seed0)
    else:
        tasks = [(config, sc, n, seed0) for sc in scenarios]
        with ProcessPoolExecutor(max_workers=nworkers) as pool:
            for sc, res in pool.map(_scenario_task, tasks, chunksize=4):
                results[sc] = res
    # re-key in input order regardless of completion order
    results = {sc: results[sc] for sc in scenarios}
    metadata = {
        "format_version": SWEEP_FORMAT_VERSION,
        "config_hash": config.config_hash(),
        "base_seed": seed0,
        "n_replicates": n,
        "n_scenarios": len(scenarios),
        "n_years": config.n_years,
        "start_year": config.start_year,
        "balance_violations": int(sum(r.balance_violations for r in results.values())),
    }
    return SweepResult(results=results, metadata=metadata)


# ---------------------------------------------------------------------------
# Sweep persistence (CSV + JSON metadata; atomic, timestamp-free)


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_sweep(sweep: SweepResult, out_dir: str | Path) -> tuple[Path, Path]:
    """Write sweep.csv and sweep_meta.json atomically; returns both paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = (["g2g_compensation", "f2e_price", "year"]
              + [f"mean_{f}" for f in INDICATOR_FIELDS]
              + [f"std_{f}" for f in INDICATOR_FIELDS])
    lines = [",".join(header)]
    for sc, res in sweep.results.items():
        for yi, year in enumerate(res.years):
            row = [repr(float(sc.g2g_compensation)), repr(float(sc.f2e_price)), str(year)]
            row += [repr(float(v)) for v in res.per_year_mean[yi]]
            row += [repr(float(v)) for v in res.per_year_std[yi]]
            lines.append(",".join(row))
    csv_path = out / "sweep.csv"
    meta_path = out / "sweep_meta.json"
    _atomic_write(csv_path, "\n".join(lines) + "\n")
    _atomic_write(meta_path, json.dumps(sweep.metadata, indent=2, sort_keys=True) + "\n")
    return csv_path, meta_path


@dataclass
class SweepTable:
    """Parsed sweep rows: (scenario, year) -> {field: mean/std}."""

    scenarios: list[PolicyScenario]
    years: list[int]
    means: dict[tuple[PolicyScenario, int], dict[str, float]]
    stds: dict[tuple[PolicyScenario, int], dict[str, float]]
    metadata: dict = field(default_factory=dict)

    def reference_year(self) -> int:
        return max(self.years)

    def at(self, scenario: PolicyScenario, year: int, fieldname: str) -> float:
        return self.means[(scenario, year)][fieldname]


def read_sweep_csv(path: str | Path) -> SweepTable:
    """Parse a sweep CSV; malformed rows are reported by number."""
    p = Path(path)
    if not p.exists():
        raise SweepFormatError(f"sweep file not found: {p}")
    means: dict = {}
    stds: dict = {}
    scenarios: list[PolicyScenario] = []
    years: list[int] = []
    seen_sc = set()
    seen_years = set()
    with p.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SweepFormatError(f"{p}: empty sweep file") from None
        expected = (["g2g_compensation", "f2e_price", "year"]
                    + [f"mean_{f}" for f in INDICATOR_FIELDS]
                    + [f"std_{f}" for f in INDICATOR_FIELDS])
        if header != expected:
            raise SweepFormatError(f"{p}: unexpected header (row 1)")
        for rownum, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected):
                raise SweepFormatError(
                    f"{p}: row {rownum} has {len(row)} columns, expected {len(expected)}")
            try:
                sc = PolicyScenario(float(row[0]), float(row[1]))
                year = int(row[2])
                nums = [float(v) for v in row[3:]]
            except ValueError as exc:
                raise SweepFormatError(f"{p}: row {rownum}: {exc}") from None
            k = len(INDICATOR_FIELDS)
            means[(sc, year)] = dict(zip(INDICATOR_FIELDS, nums[:k]))
            stds[(sc, year)] = dict(zip(INDICATOR_FIELDS, nums[k:]))
            if sc not in seen_sc:
                seen_sc.add(sc)
                scenarios.append(sc)
            if year not in seen_years:
                seen_years.add(year)
                years.append(year)
    meta_path = p.with_name("sweep_meta.json")
    metadata = {}
    if meta_path.exists():
        metadata = json.loads(meta_path.read_text())
    return SweepTable(scenarios=scenarios, years=sorted(years),
                      means=means, stds=stds, metadata=metadata)
