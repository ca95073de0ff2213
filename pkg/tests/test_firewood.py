import math
import random

import numpy as np
import pytest

from panda_sim._kernels import (
    HAVE_NUMBA,
    _py_collect,
    _py_search,
    run_collect,
    run_search,
)
from panda_sim.config import FirewoodParams, WorldConfig
from panda_sim.firewood import (
    NoZoneError,
    PathTimeoutError,
    collect,
    designate_zones,
    replenish_stocks,
    run_household_trip,
    search_path,
)
from panda_sim.worldgen import DISTURBANCE_NEVER, Cover, generate_world


def flat_world(width=30, height=30, stock=0.0):
    world = generate_world(WorldConfig(width=width, height=height), seed=1)
    world.cover[:] = int(Cover.FOREST)
    world.slope[:] = 0.0
    world.firewood_stock[:] = stock
    world.disturbance_age[:] = DISTURBANCE_NEVER
    world._static_suitability = None
    world._farmland_distance = None
    if hasattr(world, "_inverse_cost_cache"):
        del world._inverse_cost_cache
    return world


def test_designate_uniform_stock_all_blocks():
    world = flat_world(stock=100.0)
    zones = designate_zones(world, 5, 50.0)
    assert len(zones.designated) == 36  # 6x6 blocks
    assert zones.designated_cells.all()


def test_designate_strict_threshold_boundary():
    world = flat_world(stock=100.0)
    zones = designate_zones(world, 5, 100.0)
    assert len(zones.designated) == 0
    assert not zones.designated_cells.any()


def test_designate_checkerboard_means():
    world = flat_world(stock=0.0)
    rows, cols = np.indices((world.height, world.width))
    world.firewood_stock[(rows + cols) % 2 == 0] = 200.0
    zones = designate_zones(world, 2, 50.0)
    # every 2x2 block holds two 200s and two 0s -> mean 100 > 50
    assert np.allclose(zones.block_means, 100.0)
    assert len(zones.designated) == 15 * 15


def test_designate_partial_edge_blocks():
    world = flat_world(width=23, height=21, stock=80.0)
    zones = designate_zones(world, 5, 79.0)
    assert zones.block_means.shape == (math.ceil(21 / 5), math.ceil(23 / 5))
    assert np.allclose(zones.block_means, 80.0)


def test_search_start_inside_zone():
    world = flat_world(stock=100.0)
    zones = designate_zones(world, 5, 50.0)
    path = search_path((7, 7), zones, world, random.Random(0), 100)
    assert path == [(7, 7)]


def test_search_reaches_single_zone_every_seed():
    world = flat_world(stock=0.0)
    world.firewood_stock[10:20, 10:20] = 1000.0
    zones = designate_zones(world, 10, 500.0)
    assert len(zones.designated) == 1
    for seed in range(1000):
        path = search_path((2, 2), zones, world, random.Random(seed), 1000)
        assert zones.designated_cells[path[-1]]


def test_search_path_is_eight_connected_and_in_bounds():
    world = flat_world(stock=0.0)
    world.firewood_stock[20:30, 20:30] = 1000.0
    zones = designate_zones(world, 5, 500.0)
    path = search_path((0, 0), zones, world, random.Random(7), 1000)
    for (r1, c1), (r2, c2) in zip(path, path[1:]):
        assert max(abs(r1 - r2), abs(c1 - c2)) == 1
        assert world.in_bounds(r2, c2)
    assert zones.designated_cells[path[-1]]


def test_search_prefers_flat_route_over_ridge():
    """Two zones at equal distance; one sits behind a steep ridge."""
    world = flat_world(width=41, height=41, stock=0.0)
    world.slope[:] = 0.0
    # ridge between start and the northern zone
    world.slope[10:16, :] = 45.0
    world.firewood_stock[0:5, 18:23] = 1000.0    # behind the ridge
    world.firewood_stock[36:41, 18:23] = 1000.0  # flat route
    zones = designate_zones(world, 5, 400.0)
    flat_wins = 0
    trials = 1000
    for seed in range(trials):
        try:
            path = search_path((20, 20), zones, world, random.Random(seed), 2000)
        except PathTimeoutError:
            continue
        if path[-1][0] > 20:
            flat_wins += 1
    assert flat_wins / trials > 0.70


def test_search_no_zone_error():
    world = flat_world(stock=0.0)
    zones = designate_zones(world, 5, 50.0)
    with pytest.raises(NoZoneError):
        search_path((0, 0), zones, world, random.Random(0), 100)


def test_search_timeout_error():
    world = flat_world(stock=0.0)
    world.firewood_stock[25:30, 25:30] = 1000.0
    zones = designate_zones(world, 5, 500.0)
    with pytest.raises(PathTimeoutError):
        search_path((0, 0), zones, world, random.Random(3), 2)


def test_collect_zero_demand():
    world = flat_world(stock=100.0)
    before = world.firewood_stock.copy()
    trip = collect((5, 5), 0.0, world, random.Random(0), 100)
    assert trip.total_kg == 0.0
    assert trip.harvested_cells == []
    assert np.array_equal(world.firewood_stock, before)
    assert (world.disturbance_age == before * 0 + world.disturbance_age).all()


def test_collect_single_cell_satisfaction():
    world = flat_world(stock=500.0)
    trip = collect((5, 5), 200.0, world, random.Random(0), 100)
    assert trip.total_kg == pytest.approx(200.0)
    assert len(trip.harvested_cells) == 1
    assert trip.harvested_cells[0][0] == (5, 5)
    assert world.firewood_stock[5, 5] == pytest.approx(300.0)
    assert world.disturbance_age[5, 5] == 0


def test_collect_five_full_cells_exactly():
    for seed in range(20):
        world = flat_world(stock=100.0)
        trip = collect((10, 10), 500.0, world, random.Random(seed), 10_000)
        assert trip.total_kg == pytest.approx(500.0)
        emptied = [kg for _, kg in trip.harvested_cells]
        assert len(emptied) == 5
        assert all(kg == pytest.approx(100.0) for kg in emptied)


def test_collect_mass_conservation_exact():
    for seed in range(50):
        world = flat_world(stock=137.25)
        before = world.firewood_stock.copy()
        trip = collect((8, 8), 400.0, world, random.Random(seed), 5000)
        diff = before - world.firewood_stock
        assert math.fsum(diff[diff > 0]) == math.fsum(kg for _, kg in trip.harvested_cells)
        assert math.fsum(kg for _, kg in trip.harvested_cells) == trip.total_kg \
            or trip.total_kg == pytest.approx(math.fsum(kg for _, kg in trip.harvested_cells))
        # disturbance reset exactly on harvested cells
        for (r, c), kg in trip.harvested_cells:
            assert kg > 0
            assert world.disturbance_age[r, c] == 0


def test_collect_undershoot_reports_timeout():
    world = flat_world(stock=0.0)
    world.firewood_stock[3, 3] = 10.0
    trip = collect((3, 3), 500.0, world, random.Random(1), 50)
    assert trip.timed_out
    assert trip.total_kg == pytest.approx(10.0)


def test_disturbance_limited_to_harvest_by_default():
    world = flat_world(stock=0.0)
    world.firewood_stock[15, 15] = 1000.0
    never = world.disturbance_age[0, 0]
    trip = collect((10, 10), 100.0, world, random.Random(2), 5000)
    touched = {cell for cell, _ in trip.harvested_cells}
    reset = {tuple(map(int, rc)) for rc in np.argwhere(world.disturbance_age == 0)}
    assert reset == touched
    assert world.disturbance_age[0, 0] == never


def test_replenish_every_fourth_year():
    world = generate_world(WorldConfig(width=25, height=25), seed=6)
    forest = world.cover == int(Cover.FOREST)
    world.firewood_stock[forest] = 1.0
    replenish_stocks(world, 3)
    assert np.allclose(world.firewood_stock[forest], 1.0)
    replenish_stocks(world, 4)
    assert np.allclose(world.firewood_stock[forest], world.config.forest_stock_kg)


def test_replenish_skips_converted_cells():
    world = generate_world(WorldConfig(width=25, height=25), seed=6)
    forest_rc = np.argwhere(world.cover == int(Cover.FOREST))
    r, c = map(int, forest_rc[0])
    world.cover[r, c] = int(Cover.FARMLAND)
    world.firewood_stock[r, c] = 0.0
    replenish_stocks(world, 8)
    assert world.firewood_stock[r, c] == 0.0


def test_run_household_trip_matches_manual_pipeline():
    params = FirewoodParams()
    world_a = flat_world(stock=0.0)
    world_a.firewood_stock[20:25, 20:25] = 1000.0
    world_b = world_a.copy()
    zones_a = designate_zones(world_a, 5, 400.0)
    zones_b = designate_zones(world_b, 5, 400.0)
    rng_a, rng_b = random.Random(99), random.Random(99)
    total_a = run_household_trip(world_a, zones_a, (2, 2), 300.0, rng_a, 2000, params)
    path = search_path((2, 2), zones_b, world_b, rng_b, 2000, params)
    trip = collect(path[-1], 300.0, world_b, rng_b, 2000)
    assert total_a == trip.total_kg
    assert np.array_equal(world_a.firewood_stock, world_b.firewood_stock)


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
def test_python_and_numba_kernels_agree():
    world = flat_world(stock=0.0)
    world.firewood_stock[20:28, 20:28] = 321.5
    zones = designate_zones(world, 4, 100.0)
    in_zone = zones.flat_cells()
    base = np.ascontiguousarray(1.0 / (1.0 + 0.1 * world.slope.ravel()))
    h, w = world.height, world.width
    for seed in range(25):
        p_path, p_n, p_status = _py_search(2 * w + 2, in_zone, base, h, w, 500, 0.25, seed)
        n_path, n_n, n_status = run_search(2 * w + 2, in_zone, base, h, w, 500, 0.25, seed)
        assert (p_status, p_n) == (n_status, n_n)
        assert np.array_equal(p_path[:p_n], n_path[:n_n])
    for seed in range(25):
        stock_p = world.firewood_stock.ravel().copy()
        stock_n = world.firewood_stock.ravel().copy()
        age_p = world.disturbance_age.ravel().copy()
        age_n = world.disturbance_age.ravel().copy()
        out_p = _py_collect(22 * w + 22, 900.0, stock_p, age_p, h, w, 500, 0, seed)
        out_n = run_collect(22 * w + 22, 900.0, stock_n, age_n, h, w, 500, False, seed)
        assert out_p[2] == out_n[2] and out_p[3] == out_n[3] and out_p[4] == out_n[4]
        assert np.array_equal(stock_p, stock_n)
        assert np.array_equal(age_p, age_n)
