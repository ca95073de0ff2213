import json

import numpy as np
import pytest

from panda_sim.config import ConfigurationError, WorldConfig
from panda_sim.worldgen import (
    Cover,
    HabitatWeights,
    abandon_farmland,
    compute_habitat_quality,
    dump_grid,
    generate_world,
    habitat_factors,
    step_succession,
)


def test_default_world_hits_farmland_fraction():
    cfg = WorldConfig()
    world = generate_world(cfg, seed=42)
    frac = float((world.cover == int(Cover.FARMLAND)).mean())
    assert abs(frac - 0.10) <= 0.02


def test_zero_farmland_fraction_places_no_farmland():
    cfg = WorldConfig(width=20, height=20, farmland_fraction=0.0)
    world = generate_world(cfg, seed=0)
    assert int((world.cover == int(Cover.FARMLAND)).sum()) == 0


def test_generation_is_deterministic():
    cfg = WorldConfig(width=30, height=30)
    a = generate_world(cfg, seed=99)
    b = generate_world(cfg, seed=99)
    assert np.array_equal(a.cover, b.cover)
    assert np.array_equal(a.slope, b.slope)
    assert np.array_equal(a.firewood_stock, b.firewood_stock)
    assert a.settlements == b.settlements
    assert np.array_equal(a.road_mask, b.road_mask)
    assert np.array_equal(a.stream_mask, b.stream_mask)


def test_different_seeds_differ():
    cfg = WorldConfig(width=30, height=30)
    a = generate_world(cfg, seed=1)
    b = generate_world(cfg, seed=2)
    assert not np.array_equal(a.cover, b.cover)


def test_settlements_touch_farmland():
    world = generate_world(WorldConfig(), seed=5)
    farm = world.cover == int(Cover.FARMLAND)
    touching = False
    for r, c in world.settlements:
        sl = farm[max(0, r - 1): r + 2, max(0, c - 1): c + 2]
        if sl.any():
            touching = True
            break
    assert touching


def test_invalid_configs_rejected():
    with pytest.raises(ConfigurationError):
        generate_world(WorldConfig(width=10), seed=0)
    with pytest.raises(ConfigurationError):
        generate_world(WorldConfig(farmland_fraction=0.9, forest_fraction=0.5), seed=0)
    with pytest.raises(ConfigurationError):
        generate_world(WorldConfig(n_settlements=0), seed=0)


def test_water_and_builtup_hold_no_stock():
    world = generate_world(WorldConfig(), seed=11)
    blocked = (world.cover == int(Cover.WATER)) | (world.cover == int(Cover.BUILTUP))
    assert float(world.firewood_stock[blocked].max(initial=0.0)) == 0.0


# --- succession ------------------------------------------------------------


def _single_cell_world(cover: Cover, **kwargs):
    from panda_sim.worldgen import DISTURBANCE_NEVER

    cfg = WorldConfig(width=20, height=20, **kwargs)
    world = generate_world(cfg, seed=3)
    world.cover[:] = int(cover)
    world.succession_age[:] = 0
    world.disturbance_age[:] = DISTURBANCE_NEVER
    return world


def test_grassland_advances_at_dwell():
    world = _single_cell_world(Cover.GRASSLAND)
    world.succession_age[:] = world.config.dwell_grassland - 1
    step_succession(world)
    assert (world.cover == int(Cover.SHRUB)).all()
    assert (world.succession_age == 0).all()


def test_forest_is_absorbing():
    world = _single_cell_world(Cover.FOREST)
    for _ in range(50):
        step_succession(world)
    assert (world.cover == int(Cover.FOREST)).all()


def test_abandoned_farmland_reaches_forest_after_eight_steps():
    world = _single_cell_world(Cover.FARMLAND)
    cells = [(5, 5)]
    abandon_farmland(world, cells)
    assert world.cover[5, 5] == int(Cover.GRASSLAND)
    for step in range(1, 9):
        step_succession(world)
        if step < 3:
            assert world.cover[5, 5] == int(Cover.GRASSLAND), step
        elif step < 8:
            assert world.cover[5, 5] == int(Cover.SHRUB), step
    assert world.cover[5, 5] == int(Cover.FOREST)


def test_cultivated_and_builtup_never_transition():
    world = _single_cell_world(Cover.FARMLAND)
    world.cover[0, 0] = int(Cover.BUILTUP)
    for _ in range(30):
        step_succession(world)
    assert world.cover[5, 5] == int(Cover.FARMLAND)
    assert world.cover[0, 0] == int(Cover.BUILTUP)


def test_succession_never_moves_backward():
    order = {int(Cover.GRASSLAND): 0, int(Cover.SHRUB): 1, int(Cover.FOREST): 2}
    world = generate_world(WorldConfig(width=25, height=25), seed=8)
    before = world.cover.copy()
    for _ in range(20):
        prev = world.cover.copy()
        step_succession(world)
        moved = prev != world.cover
        for r, c in zip(*np.nonzero(moved)):
            assert order[int(world.cover[r, c])] == order[int(prev[r, c])] + 1
    # classes outside the chain are untouched
    chain = np.isin(before, [int(Cover.GRASSLAND), int(Cover.SHRUB)])
    assert np.array_equal(world.cover[~chain], before[~chain])


# --- habitat quality ---------------------------------------------------------


def test_cover_only_weights_all_forest_scores_one():
    world = _single_cell_world(Cover.FOREST)
    weights = HabitatWeights(slope=0, stream=0, cover=1, bamboo=0,
                             roads=0, farmland=0, settlements=0)
    report = compute_habitat_quality(world, weights)
    assert np.allclose(report.per_cell, 1.0)
    assert report.index == pytest.approx(world.n_cells)
    assert report.mean == pytest.approx(1.0)


def test_uniform_weights_match_hand_recomputation():
    world = generate_world(WorldConfig(width=25, height=25), seed=21)
    factors = habitat_factors(world)
    report = compute_habitat_quality(world)
    r, c = 12, 17
    expected = sum(factors[k][r, c] for k in factors) / 7.0
    assert report.per_cell[r, c] == pytest.approx(expected, rel=1e-12)
    # every factor is a [0, 1] suitability
    for grid in factors.values():
        assert float(grid.min()) >= 0.0 and float(grid.max()) <= 1.0


def test_reverting_farmland_strictly_improves_habitat():
    world = generate_world(WorldConfig(), seed=13)
    before = compute_habitat_quality(world).index
    farm = np.argwhere(world.cover == int(Cover.FARMLAND))
    r, c = map(int, farm[0])
    abandon_farmland(world, [(r, c)])
    after = compute_habitat_quality(world).index
    assert after > before


def test_disturbance_never_raises_habitat():
    world = generate_world(WorldConfig(), seed=14)
    base = compute_habitat_quality(world).index
    target = np.argwhere(world.cover == int(Cover.FOREST))[0]
    world.disturbance_age[int(target[0]), int(target[1])] = 0
    disturbed = compute_habitat_quality(world).index
    assert disturbed <= base


def test_habitat_index_bounds():
    world = generate_world(WorldConfig(width=30, height=30), seed=15)
    report = compute_habitat_quality(world)
    assert 0.0 <= report.index <= world.n_cells


def test_habitat_weight_validation():
    with pytest.raises(ConfigurationError):
        HabitatWeights.from_sequence([1, 0, 0, 0, 0, 0, 0.5])
    with pytest.raises(ConfigurationError):
        HabitatWeights.from_sequence([-1, 2, 0, 0, 0, 0, 0])
    with pytest.raises(ConfigurationError):
        HabitatWeights.from_sequence([0.5, 0.5])


def test_grid_dump_roundtrip_header():
    world = generate_world(WorldConfig(width=22, height=20), seed=4)
    dump = dump_grid(world)
    header, *rows = dump.strip().split("\n")
    meta = json.loads(header)
    assert meta["width"] == 22 and meta["height"] == 20 and meta["seed"] == 4
    assert len(rows) == 20
    assert all(len(row) == 22 for row in rows)
