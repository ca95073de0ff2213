"""Synthetic raster landscape: generation, vegetation succession, habitat quality.

The real reserve's GIS layers are not available, so the world is synthesized:
a smoothed-noise slope field carved by a stream valley, a road along the
valley, settlement clusters on the road, farmland grown around settlements,
and vegetation patches (bamboo/grassland/shrub) inside a forest matrix. Cover
class counts hit the configured fractions exactly by construction.

Habitat quality is a seven-factor weighted overlay (slope, stream proximity,
land cover, bamboo presence, and distances to roads, farmland and settlements)
with per-cell scores in [0, 1]; the index is the sum over cells (the mean is
also reported).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable

import numpy as np
from scipy import ndimage

from .config import ConfigurationError, WorldConfig

DISTURBANCE_NEVER = np.iinfo(np.int32).max // 2  # sentinel: never disturbed

CELL_SIZE_M = 90


class Cover(IntEnum):
    FARMLAND = 0
    GRASSLAND = 1
    SHRUB = 2
    FOREST = 3
    BAMBOO = 4
    WATER = 5
    BUILTUP = 6
    BARE = 7


COVER_CHARS = {
    Cover.FARMLAND: "f",
    Cover.GRASSLAND: "g",
    Cover.SHRUB: "s",
    Cover.FOREST: "F",
    Cover.BAMBOO: "B",
    Cover.WATER: "~",
    Cover.BUILTUP: "#",
    Cover.BARE: ".",
}

_COVER_KEYS = {
    "farmland": Cover.FARMLAND,
    "grassland": Cover.GRASSLAND,
    "shrub": Cover.SHRUB,
    "forest": Cover.FOREST,
    "bamboo": Cover.BAMBOO,
    "water": Cover.WATER,
    "builtup": Cover.BUILTUP,
    "bare": Cover.BARE,
}


@dataclass
class HabitatWeights:
    """Seven factor weights; non-negative and summing to one."""

    slope: float = 1 / 7
    stream: float = 1 / 7
    cover: float = 1 / 7
    bamboo: float = 1 / 7
    roads: float = 1 / 7
    farmland: float = 1 / 7
    settlements: float = 1 / 7

    def as_tuple(self) -> tuple[float, ...]:
        return (self.slope, self.stream, self.cover, self.bamboo,
                self.roads, self.farmland, self.settlements)

    def validate(self) -> None:
        vals = self.as_tuple()
        if min(vals) < 0:
            raise ConfigurationError("habitat weights must be non-negative")
        if abs(sum(vals) - 1.0) > 1e-9:
            raise ConfigurationError(f"habitat weights must sum to 1, got {sum(vals)!r}")

    @classmethod
    def from_sequence(cls, seq: Iterable[float]) -> "HabitatWeights":
        vals = tuple(float(v) for v in seq)
        if len(vals) != 7:
            raise ConfigurationError(f"expected 7 habitat weights, got {len(vals)}")
        w = cls(*vals)
        w.validate()
        return w


@dataclass
class Landscape:
    """Raster state of one replicate. Arrays are (height, width), row-major."""

    width: int
    height: int
    cover: np.ndarray            # int8, Cover values
    slope: np.ndarray            # float64, degrees in [0, 60]
    firewood_stock: np.ndarray   # float64, kg >= 0
    disturbance_age: np.ndarray  # int32, years since disturbance (sentinel if never)
    succession_age: np.ndarray   # int32, years in current cover class
    settlements: list[tuple[int, int]]
    road_mask: np.ndarray        # bool
    stream_mask: np.ndarray      # bool
    config: WorldConfig
    seed: int
    cell_size: int = CELL_SIZE_M
    # cached static distance fields (cells); rebuilt lazily when stale
    _farmland_distance: np.ndarray | None = field(default=None, repr=False)
    _static_suitability: dict | None = field(default=None, repr=False)

    @property
    def n_cells(self) -> int:
        return self.width * self.height

    @property
    def roads(self) -> set[tuple[int, int]]:
        return {(int(r), int(c)) for r, c in zip(*np.nonzero(self.road_mask))}

    @property
    def streams(self) -> set[tuple[int, int]]:
        return {(int(r), int(c)) for r, c in zip(*np.nonzero(self.stream_mask))}

    def in_bounds(self, r: int, c: int) -> bool:
        return 0 <= r < self.height and 0 <= c < self.width

    def invalidate_farmland_distance(self) -> None:
        self._farmland_distance = None

    def copy(self) -> "Landscape":
        dup = Landscape(
            width=self.width, height=self.height,
            cover=self.cover.copy(), slope=self.slope.copy(),
            firewood_stock=self.firewood_stock.copy(),
            disturbance_age=self.disturbance_age.copy(),
            succession_age=self.succession_age.copy(),
            settlements=list(self.settlements),
            road_mask=self.road_mask.copy(), stream_mask=self.stream_mask.copy(),
            config=self.config, seed=self.seed, cell_size=self.cell_size,
        )
        # Derived caches over static fields can be shared: invalidation swaps
        # the reference, it never mutates the cached arrays in place.
        dup._static_suitability = self._static_suitability
        dup._farmland_distance = self._farmland_distance
        cost = getattr(self, "_inverse_cost_cache", None)
        if cost is not None:
            dup._inverse_cost_cache = cost  # type: ignore[attr-defined]
        return dup


@dataclass
class HabitatReport:
    """Sum and mean of per-cell suitability plus the per-cell grid."""

    index: float
    mean: float
    per_cell: np.ndarray
    normalized: float | None = None  # index / year-0 index, filled by the engine


def _distance_to(mask: np.ndarray) -> np.ndarray:
    """Euclidean distance (in cells) to the nearest True cell; inf if none."""
    if not mask.any():
        return np.full(mask.shape, np.inf)
    return ndimage.distance_transform_edt(~mask)


def _grow_region(order_value: np.ndarray, available: np.ndarray,
                 seeds: list[tuple[int, int]], count: int,
                 rng: np.random.Generator) -> list[tuple[int, int]]:
    """Grow a connected-ish region of `count` cells from seeds, preferring
    low order_value cells among the frontier (deterministic tie-break)."""
    import heapq

    h, w = available.shape
    chosen: list[tuple[int, int]] = []
    heap: list[tuple[float, tuple[int, int]]] = []
    seen: set[tuple[int, int]] = set()
    for s in seeds:
        if 0 <= s[0] < h and 0 <= s[1] < w and available[s] and s not in seen:
            seen.add(s)
            heapq.heappush(heap, (float(order_value[s]), s))
    while len(chosen) < count and heap:
        _, cell = heapq.heappop(heap)
        if not available[cell]:
            continue
        available[cell] = False
        chosen.append(cell)
        r, c = cell
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                if dr == 0 and dc == 0:
                    continue
                rr, cc = r + dr, c + dc
                key = (rr, cc)
                if 0 <= rr < h and 0 <= cc < w and available[rr, cc] and key not in seen:
                    seen.add(key)
                    # small jitter keeps patch edges irregular
                    heapq.heappush(
                        heap, (float(order_value[rr, cc]) + 0.05 * rng.random(), key)
                    )
    return chosen


def generate_world(config: WorldConfig, seed: int) -> Landscape:
    """Build the synthetic landscape. Identical (config, seed) gives an
    identical landscape, byte for byte."""
    config.validate()
    rng = np.random.default_rng(seed)
    h, w = config.height, config.width
    n_cells = h * w

    # Slope: smoothed gaussian noise rescaled to [0, max_slope], flattened
    # into a valley around the stream.
    noise = rng.standard_normal((h, w))
    smooth = ndimage.gaussian_filter(noise, sigma=config.noise_sigma)
    smooth -= smooth.min()
    peak = smooth.max()
    if peak > 0:
        smooth /= peak
    slope = smooth * config.max_slope_deg

    # Stream: jittered west-east line near mid-height.
    stream_mask = np.zeros((h, w), dtype=bool)
    row = h // 2
    stream_rows = np.empty(w, dtype=np.int64)
    for c in range(w):
        row = int(np.clip(row + rng.integers(-1, 2), 2, h - 3))
        stream_rows[c] = row
        stream_mask[row, c] = True

    stream_dist = _distance_to(stream_mask)
    valley = np.clip(stream_dist / max(config.valley_halfwidth, 1), 0.0, 1.0)
    slope = slope * (0.15 + 0.85 * valley)
    slope[stream_mask] = 0.0

    # Road: parallels the stream a few rows south, clipped in bounds.
    road_mask = np.zeros((h, w), dtype=bool)
    offset = 3
    for c in range(w):
        rr = int(np.clip(stream_rows[c] + offset, 0, h - 1))
        road_mask[rr, c] = True

    cover = np.full((h, w), int(Cover.BARE), dtype=np.int8)
    cover[stream_mask] = int(Cover.WATER)

    # Budgets: exact cell counts per class.
    budget = {
        Cover.FARMLAND: round(config.farmland_fraction * n_cells),
        Cover.FOREST: round(config.forest_fraction * n_cells),
        Cover.SHRUB: round(config.shrub_fraction * n_cells),
        Cover.GRASSLAND: round(config.grassland_fraction * n_cells),
        Cover.BAMBOO: round(config.bamboo_fraction * n_cells),
        Cover.BUILTUP: round(config.builtup_fraction * n_cells),
    }

    available = (cover == int(Cover.BARE)) & ~road_mask

    # Settlements: contiguous built-up blobs anchored on the road, spaced
    # evenly along it.
    settlements: list[tuple[int, int]] = []
    n_set = config.n_settlements
    builtup_count = max(budget[Cover.BUILTUP], n_set)
    anchors = [
        (int(np.clip(stream_rows[c] + offset + 1, 0, h - 1)), c)
        for c in np.linspace(w * 0.15, w * 0.85, n_set).astype(int)
    ]
    per_blob = [builtup_count // n_set] * n_set
    for i in range(builtup_count % n_set):
        per_blob[i] += 1
    for anchor, size in zip(anchors, per_blob):
        blob = _grow_region(slope, available, [anchor], size, rng)
        for cell in blob:
            cover[cell] = int(Cover.BUILTUP)
            settlements.append(cell)

    # Farmland grows around the settlements on the flattest remaining land,
    # guaranteeing adjacency to the built-up cells.
    farm_seeds: list[tuple[int, int]] = []
    for r, c in settlements:
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                rr, cc = r + dr, c + dc
                if 0 <= rr < h and 0 <= cc < w and available[rr, cc]:
                    farm_seeds.append((rr, cc))
    farm_cells = _grow_region(slope, available, farm_seeds, budget[Cover.FARMLAND], rng)
    for cell in farm_cells:
        cover[cell] = int(Cover.FARMLAND)

    # Bamboo, grassland and shrub: patches seeded away from the valley.
    def scatter_seeds(k: int) -> list[tuple[int, int]]:
        cand = np.argwhere(available)
        if len(cand) == 0:
            return []
        idx = rng.choice(len(cand), size=min(k, len(cand)), replace=False)
        return [tuple(map(int, cand[i])) for i in np.atleast_1d(idx)]

    for cls, n_patches in ((Cover.BAMBOO, 6), (Cover.GRASSLAND, 8), (Cover.SHRUB, 8)):
        cells = _grow_region(-slope, available, scatter_seeds(n_patches), budget[cls], rng)
        for cell in cells:
            cover[cell] = int(cls)

    # Forest fills the remaining budget; whatever is left over stays bare.
    forest_cells = np.argwhere(available)
    order = rng.permutation(len(forest_cells))
    for i in order[: budget[Cover.FOREST]]:
        r, c = forest_cells[i]
        cover[r, c] = int(Cover.FOREST)
        available[r, c] = False

    firewood_stock = np.zeros((h, w))
    firewood_stock[cover == int(Cover.FOREST)] = config.forest_stock_kg
    firewood_stock[cover == int(Cover.SHRUB)] = config.shrub_stock_kg

    disturbance_age = np.full((h, w), DISTURBANCE_NEVER, dtype=np.int32)
    # Farmland and built-up land are under active human use from the start.
    disturbance_age[(cover == int(Cover.FARMLAND)) | (cover == int(Cover.BUILTUP))] = 0

    return Landscape(
        width=w, height=h, cover=cover, slope=slope,
        firewood_stock=firewood_stock,
        disturbance_age=disturbance_age,
        succession_age=np.zeros((h, w), dtype=np.int32),
        settlements=sorted(settlements),
        road_mask=road_mask, stream_mask=stream_mask,
        config=config, seed=seed,
    )


def abandon_farmland(landscape: Landscape, cells: Iterable[tuple[int, int]]) -> None:
    """Revert farmland cells: reversion starts the succession clock at
    Grassland (so Forest is reached after dwell_grassland + dwell_shrub steps)."""
    changed = False
    for r, c in cells:
        if landscape.cover[r, c] == int(Cover.FARMLAND):
            landscape.cover[r, c] = int(Cover.GRASSLAND)
            landscape.succession_age[r, c] = 0
            changed = True
    if changed:
        landscape.invalidate_farmland_distance()


def step_succession(landscape: Landscape) -> Landscape:
    """Advance vegetation one year. Transitions run only forward along
    Grassland -> Shrub -> Forest; farmland under cultivation and built-up
    cells never transition."""
    cfg = landscape.config
    age = landscape.succession_age
    cover = landscape.cover
    age += 1
    to_shrub = (cover == int(Cover.GRASSLAND)) & (age >= cfg.dwell_grassland)
    to_forest = (cover == int(Cover.SHRUB)) & (age >= cfg.dwell_shrub)
    cover[to_shrub] = int(Cover.SHRUB)
    age[to_shrub] = 0
    cover[to_forest] = int(Cover.FOREST)
    age[to_forest] = 0
    # Newly matured shrub/forest becomes harvestable at the next replenishment;
    # stock itself is managed by the firewood module.
    return landscape


def _static_fields(landscape: Landscape) -> dict:
    """Distance fields that cannot change within a run (roads, streams,
    settlements, bamboo) plus the slope suitability."""
    if landscape._static_suitability is not None:
        return landscape._static_suitability
    cfg = landscape.config
    h, w = landscape.height, landscape.width

    slope = landscape.slope
    flat, steep = cfg.slope_flat_deg, cfg.slope_steep_deg
    s_slope = np.clip((steep - slope) / max(steep - flat, 1e-9), 0.0, 1.0)
    s_slope[slope <= flat] = 1.0

    d_stream = _distance_to(landscape.stream_mask)
    peak, fall = cfg.stream_peak_cells, cfg.stream_falloff_cells
    s_stream = np.clip((fall - d_stream) / max(fall - peak, 1e-9), 0.0, 1.0)
    s_stream[d_stream <= peak] = 1.0

    d_road = _distance_to(landscape.road_mask)
    s_road = np.clip(d_road / cfg.access_radius_cells, 0.0, 1.0)

    settle_mask = np.zeros((h, w), dtype=bool)
    for r, c in landscape.settlements:
        settle_mask[r, c] = True
    s_settle = np.clip(_distance_to(settle_mask) / cfg.access_radius_cells, 0.0, 1.0)

    d_bamboo = _distance_to(landscape.cover == int(Cover.BAMBOO))
    s_bamboo = np.clip(1.0 - d_bamboo / cfg.bamboo_radius_cells, 0.0, 1.0)

    landscape._static_suitability = {
        "slope": s_slope, "stream": s_stream, "roads": s_road,
        "settlements": s_settle, "bamboo": s_bamboo,
    }
    return landscape._static_suitability


def _cover_suitability_lut(cfg: WorldConfig) -> np.ndarray:
    lut = np.zeros(len(Cover))
    for name, value in cfg.cover_suitability.items():
        if name not in _COVER_KEYS:
            raise ConfigurationError(f"unknown cover class '{name}' in cover_suitability")
        lut[int(_COVER_KEYS[name])] = value
    return lut


def habitat_factors(landscape: Landscape) -> dict[str, np.ndarray]:
    """The seven per-cell suitability grids, each in [0, 1]."""
    cfg = landscape.config
    static = _static_fields(landscape)

    lut = _cover_suitability_lut(cfg)
    s_cover = lut[landscape.cover.astype(np.int64)]
    disturbed = landscape.disturbance_age < cfg.disturbance_horizon_years
    s_cover = np.where(disturbed, s_cover * cfg.disturbance_cover_penalty, s_cover)

    if landscape._farmland_distance is None:
        landscape._farmland_distance = _distance_to(landscape.cover == int(Cover.FARMLAND))
    s_farm = np.clip(landscape._farmland_distance / cfg.access_radius_cells, 0.0, 1.0)

    return {
        "slope": static["slope"],
        "stream": static["stream"],
        "cover": s_cover,
        "bamboo": static["bamboo"],
        "roads": static["roads"],
        "farmland": s_farm,
        "settlements": static["settlements"],
    }


def compute_habitat_quality(landscape: Landscape,
                            weights: HabitatWeights | None = None) -> HabitatReport:
    """Weighted seven-factor overlay; pure read of the landscape."""
    if weights is None:
        weights = HabitatWeights.from_sequence(landscape.config.habitat_weights)
    else:
        weights.validate()
    factors = habitat_factors(landscape)
    per_cell = (
        weights.slope * factors["slope"]
        + weights.stream * factors["stream"]
        + weights.cover * factors["cover"]
        + weights.bamboo * factors["bamboo"]
        + weights.roads * factors["roads"]
        + weights.farmland * factors["farmland"]
        + weights.settlements * factors["settlements"]
    )
    index = float(per_cell.sum())
    return HabitatReport(index=index, mean=index / landscape.n_cells, per_cell=per_cell)


def dump_grid(landscape: Landscape) -> str:
    """Debug dump: JSON header line, then one character per cell cover class.
    Not a stable format."""
    import json as _json

    header = _json.dumps({
        "width": landscape.width, "height": landscape.height,
        "seed": landscape.seed, "cell_size": landscape.cell_size,
    })
    chars = np.empty(landscape.cover.shape, dtype="<U1")
    for cls, ch in COVER_CHARS.items():
        chars[landscape.cover == int(cls)] = ch
    rows = ["".join(row) for row in chars]
    return header + "\n" + "\n".join(rows) + "\n"
