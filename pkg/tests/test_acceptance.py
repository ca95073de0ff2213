"""Acceptance criteria, one test per criterion, each printing a PASS line.

The full-scale energy-balance sweep (273 scenarios x 30 replicates x 14 years
on the 100x100 default world) is marked `fullsweep` and runs via
`pytest -m fullsweep`; an always-on smoke-scale variant covers the same
invariant on a 3x3 scenario lattice within the stated 30-second budget.
"""

import math
import random

import numpy as np
import pytest
from scipy import stats

from panda_sim.analysis import (
    FittedSurrogate,
    SurrogateForm,
    eval_surrogate,
    fit_surrogate,
    pareto_frontier,
    points_from_sweep,
    posterior_select,
)
from panda_sim.bundle import bundle_from_sweep, write_bundle
from panda_sim.config import RunConfig
from panda_sim.energy import carbon_footprint, total_energy_demand
from panda_sim.engine import read_sweep_csv, run_scenario, run_sweep, write_sweep
from panda_sim.firewood import (
    PathTimeoutError,
    collect,
    designate_zones,
    search_path,
)
from panda_sim.fixtures import reference_frontier, reference_query
from panda_sim.policy import PolicyScenario, scenario_grid
from panda_sim.worldgen import generate_world

from test_analysis import brute_force_frontier, point
from conftest import smoke_config


def report(name: str, ok: bool) -> None:
    print(f"{'PASS' if ok else 'FAIL'}  {name}")
    assert ok, name


SMOKE_LATTICE = [PolicyScenario(g, p) for g in (0.0, 1000.0, 2000.0)
                 for p in (0.65, 0.35, 0.05)]


def test_energy_formula_fixture_12_digits():
    """Tables 3/4: hand-computed exponents to 12 significant digits."""
    unit = {"demand_unit_scale": 1.0}
    from panda_sim.config import EnergyCoefficients

    c = EnergyCoefficients(**unit)
    ok = True
    ok &= math.isclose(total_energy_demand(1, 1.0, 1, c), 10 ** 6.333, rel_tol=1e-12)
    ok &= math.isclose(total_energy_demand(3, 2.0, 8, c), 10 ** 6.856, rel_tol=1e-12)
    from panda_sim.energy import total_electricity_demand

    ok &= math.isclose(total_electricity_demand(2, 1.0, True, 0.65, c),
                       10 ** 6.635, rel_tol=1e-12)
    constant_only = EnergyCoefficients(demand_unit_scale=1.0, tend_household_type=0.0,
                                       tend_room_area=0.0, tend_rooms=0.0)
    ok &= math.isclose(total_energy_demand(1, 1.0, 1, constant_only),
                       10 ** 6.069, rel_tol=1e-12)
    ok &= (c.tend_constant, c.tend_household_type, c.tend_room_area, c.tend_rooms) \
        == (6.069, 0.205, 0.050, 0.009)
    ok &= (c.teld_constant, c.teld_room_area, c.teld_business, c.teld_household_type) \
        == (5.684, 0.072, 0.447, 0.216)
    report("energy-formula fixture (Tables 3/4, 12 significant digits)", ok)


def test_carbon_exactness_10000_pairs():
    rng = np.random.default_rng(99)
    firewood = rng.uniform(0, 1e7, size=10_000)
    electricity = rng.uniform(0, 1e7, size=10_000)
    ok = all(
        carbon_footprint(f, e) == 1.4375 * f + 0.96 * e
        for f, e in zip(firewood, electricity)
    )
    report("carbon exactness (10,000 random pairs, bit-exact)", ok)


def test_energy_balance_smoke_scale():
    """3x3-scenario variant of the full-sweep balance criterion (<30 s)."""
    cfg = RunConfig(n_replicates=30)
    sweep = run_sweep(cfg, SMOKE_LATTICE, workers=1)
    violations = sweep.metadata["balance_violations"]
    report(f"energy balance, smoke 3x3 lattice (violations={violations})",
           violations == 0)


@pytest.mark.fullsweep
def test_energy_balance_full_sweep(tmp_path_factory):
    """Full 273 x 30 x 14 default-world sweep: every household-year balances;
    the Pareto frontier of the resulting 273 points matches the brute-force
    oracle."""
    cfg = RunConfig()
    sweep = run_sweep(cfg, workers=None)
    violations = sweep.metadata["balance_violations"]
    report(f"energy balance, full sweep (violations={violations})",
           violations == 0)
    out = tmp_path_factory.mktemp("fullsweep")
    csv_path, _ = write_sweep(sweep, out)
    table = read_sweep_csv(csv_path)
    points = points_from_sweep(table)
    ok = pareto_frontier(points) == brute_force_frontier(points)
    report("pareto oracle equivalence on the full default sweep", ok)


def test_pareto_oracle_equivalence(full_grid_sweep):
    _, csv_path = full_grid_sweep
    table = read_sweep_csv(csv_path)
    sweep_points = points_from_sweep(table)
    ok = len(sweep_points) == 273
    ok &= pareto_frontier(sweep_points) == brute_force_frontier(sweep_points)

    rng = np.random.default_rng(7)
    sizes = [int(rng.integers(1, 61)) for _ in range(195)] + [300, 500, 700, 900, 1000]
    for n in sizes:
        if rng.random() < 0.5:
            values = rng.integers(0, 6, size=(n, 3)).astype(float)  # ties, duplicates
        else:
            values = rng.normal(size=(n, 3))
        pts = [point(*row) for row in values]
        if pareto_frontier(pts) != brute_force_frontier(pts):
            ok = False
            break
    report("pareto frontier equals brute-force oracle (273-point sweep + "
           "200 random instances)", ok)


def test_surrogate_fixtures():
    g2g = FittedSurrogate(SurrogateForm.G2G_BUDGET, [1.8845, 0.0047, 226620.6])
    f2e = FittedSurrogate(SurrogateForm.F2E_BUDGET, [1.9104e-8, 0.5094, -824291.4])
    ok = math.isclose(eval_surrogate(g2g, 0.0, 0.0), 226622.4845, abs_tol=1e-9)
    ok &= eval_surrogate(f2e, 0.0, 0.0) == -824291.4
    ok &= math.isclose(eval_surrogate(g2g, 1000.0, 0.0),
                       1.8845 * math.exp(4.7) + 226620.6, rel_tol=1e-12)
    ok &= math.isclose(eval_surrogate(g2g, 1000.0, 0.0), 226827.8, rel_tol=1e-6)
    report("surrogate evaluation fixtures (worked values)", ok)


def test_nested_r2_on_sweep_data(full_grid_sweep):
    _, csv_path = full_grid_sweep
    table = read_sweep_csv(csv_path)
    points = points_from_sweep(table)
    samples = [(p.reverted_area_mu, p.electricity_kwh, p.objectives.habitat_index)
               for p in points]
    cubic = fit_surrogate(samples, SurrogateForm.HABITAT_CUBIC, seed=3)
    quad = fit_surrogate(samples, SurrogateForm.ECON_QUADRATIC, seed=3)
    ok = cubic.train_r2 >= quad.train_r2 - 1e-12
    report(f"nested-model R^2 (cubic {cubic.train_r2:.4f} >= "
           f"quadratic {quad.train_r2:.4f})", ok)


def test_g2g_dose_response_shape():
    """30-replicate mean reverted area: monotone in compensation with a
    diminishing marginal gain above 1000 CNY/Mu."""
    cfg = RunConfig()
    comps = [float(c) for c in range(0, 2001, 100)]
    means = []
    for comp in comps:
        res = run_scenario(cfg, PolicyScenario(comp, 0.65), 30)
        means.append(res.mean(cfg.n_years - 1, "reverted_area_mu"))
    rho = stats.spearmanr(comps, means).statistic
    gain_low = means[comps.index(1000.0)] - means[0]
    gain_high = means[-1] - means[comps.index(1000.0)]
    ok = rho >= 0.9 and gain_high < gain_low
    report(f"reverted-area dose response (spearman {rho:.3f}, "
           f"gain<=1000 {gain_low:.0f} Mu vs gain>1000 {gain_high:.0f} Mu)", ok)


def test_f2e_dose_response_shape():
    """30-replicate mean subsidy non-increasing in price; firewood lower at
    0.45 than at the unsubsidized 0.65 (g2g = 0 row)."""
    cfg = RunConfig()
    prices = [round(0.65 - 0.05 * i, 2) for i in range(13)]
    subsidies = []
    firewood = {}
    for price in prices:
        res = run_scenario(cfg, PolicyScenario(0.0, price), 30)
        subsidies.append(res.mean(cfg.n_years - 1, "f2e_subsidy"))
        firewood[price] = res.mean(cfg.n_years - 1, "firewood_kg")
    rho = stats.spearmanr(prices, subsidies).statistic
    ok = rho <= -0.9 and firewood[0.45] < firewood[0.65]
    report(f"f2e dose response (spearman {rho:.3f}, firewood 0.45 "
           f"{firewood[0.45]:.0f} < 0.65 {firewood[0.65]:.0f})", ok)


def test_determinism_byte_identical_outputs(tmp_path):
    cfg = smoke_config(n_replicates=3)
    # 5x5 lattice: enough scenarios for the bundle's cubic surrogate fit
    lattice = [PolicyScenario(g, p)
               for g in (0.0, 500.0, 1000.0, 1500.0, 2000.0)
               for p in (0.65, 0.50, 0.35, 0.20, 0.05)]
    outputs = []
    for run in ("a", "b"):
        sweep = run_sweep(cfg, lattice, workers=1)
        out = tmp_path / run
        csv_path, meta_path = write_sweep(sweep, out)
        bundle = bundle_from_sweep(read_sweep_csv(csv_path))
        bundle_path = write_bundle(bundle, out / "bundle.json")
        outputs.append((csv_path.read_bytes(), meta_path.read_bytes(),
                        bundle_path.read_bytes()))
    ok = outputs[0] == outputs[1]
    report("determinism: byte-identical sweep CSV, metadata and bundle", ok)


def test_posterior_reference_selection():
    ranked = posterior_select(reference_frontier(), None, reference_query())
    ok = bool(ranked) and ranked[0].point.scenario == PolicyScenario(900.0, 0.35)
    report("posterior selection fixture -> (G2G 900, F2E 0.35) at rank 1", ok)


def test_firewood_trips_mass_and_path_validity():
    """10,000 seeded trips: exact stock conservation, 8-connected in-bounds
    paths, zone-terminated or explicitly timed out."""
    from panda_sim.config import WorldConfig

    world = generate_world(WorldConfig(width=40, height=40), seed=17)
    zones = designate_zones(world, 5, 0.25 * world.config.forest_stock_kg)
    max_steps = 4 * (world.width + world.height)
    settlements = world.settlements
    ok = True
    timeouts = 0
    for trial in range(10_000):
        rng = random.Random(trial)
        start = settlements[trial % len(settlements)]
        try:
            path = search_path(start, zones, world, rng, max_steps)
        except PathTimeoutError:
            timeouts += 1
            continue
        for (r1, c1), (r2, c2) in zip(path, path[1:]):
            if max(abs(r1 - r2), abs(c1 - c2)) != 1 or not world.in_bounds(r2, c2):
                ok = False
        if not zones.designated_cells[path[-1]]:
            ok = False
        before = world.firewood_stock.copy()
        trip = collect(path[-1], 150.0, world, rng, max_steps)
        diff = before - world.firewood_stock
        removed = math.fsum(diff[diff != 0.0])
        if removed != math.fsum(kg for _, kg in trip.harvested_cells):
            ok = False
        if not math.isclose(trip.total_kg, removed, rel_tol=0, abs_tol=0):
            ok = False
        if trial % 500 == 0:  # keep the zone map honest as stock depletes
            zones = designate_zones(world, 5, 0.25 * world.config.forest_stock_kg)
            if not zones.any_designated:
                world.firewood_stock[:] = world.config.forest_stock_kg
                zones = designate_zones(world, 5, 0.25 * world.config.forest_stock_kg)
    report(f"firewood mass conservation + path validity "
           f"(10,000 trips, {timeouts} timeouts)", ok)
