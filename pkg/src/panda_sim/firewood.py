"""Two-step firewood collection on the raster.

Step one designates collection zones: the landscape is tiled into square
blocks, and blocks whose mean stock exceeds a threshold are designated. A
roulette-wheel walk then routes the collector from the settlement toward any
designated block, weighting each 8-neighbor move by the inverse of its slope
resistance cost (diagonal moves cost sqrt(2) more; revisits are damped to a
quarter weight). Step two is a uniform random walk inside the zone harvesting
cell stocks until the trip demand is met.

The walks run on shared scalar kernels (JIT-compiled when numba is available,
pure Python otherwise; identical streams either way). Harvest bookkeeping
records the exact float decrement applied to each cell, so trip totals and
landscape stock deltas agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import run_collect, run_search
from .config import FirewoodParams
from .worldgen import Cover, Landscape


class NoZoneError(RuntimeError):
    """No block qualifies as a collection zone."""


class PathTimeoutError(RuntimeError):
    """The walk failed to reach a designated zone within the step budget."""


@dataclass
class ZoneMap:
    block_size: int
    block_means: np.ndarray          # (block_rows, block_cols) mean stock
    designated: set[int]             # flat block ids with mean > threshold
    designated_cells: np.ndarray     # bool (h, w), cell lies in a designated block
    _flat_cells: np.ndarray | None = field(default=None, repr=False)

    @property
    def any_designated(self) -> bool:
        return bool(self.designated)

    def flat_cells(self) -> np.ndarray:
        if self._flat_cells is None:
            self._flat_cells = np.ascontiguousarray(
                self.designated_cells.ravel().astype(np.uint8))
        return self._flat_cells


@dataclass
class Trip:
    household_id: int
    path: list[tuple[int, int]]
    harvested_cells: list[tuple[tuple[int, int], float]] = field(default_factory=list)
    total_kg: float = 0.0
    timed_out: bool = False


def designate_zones(landscape: Landscape, block_size: int,
                    threshold_kg: float) -> ZoneMap:
    """Partition statistics over firewood stock; strict `mean > threshold`."""
    if block_size < 1:
        raise ValueError("block_size must be >= 1")
    stock = landscape.firewood_stock
    h, w = stock.shape
    row_idx = np.arange(0, h, block_size)
    col_idx = np.arange(0, w, block_size)
    sums = np.add.reduceat(np.add.reduceat(stock, row_idx, axis=0), col_idx, axis=1)
    row_counts = np.diff(np.append(row_idx, h))
    col_counts = np.diff(np.append(col_idx, w))
    means = sums / np.outer(row_counts, col_counts)
    designated_grid = means > threshold_kg
    designated = {int(i) for i in np.flatnonzero(designated_grid)}
    cells = np.repeat(np.repeat(designated_grid, block_size, axis=0),
                      block_size, axis=1)[:h, :w]
    return ZoneMap(block_size=block_size, block_means=means,
                   designated=designated, designated_cells=cells)


def _base_weights(landscape: Landscape, params: FirewoodParams) -> np.ndarray:
    """Flat per-cell inverse slope-resistance, cached on the landscape."""
    cache = getattr(landscape, "_inverse_cost_cache", None)
    if cache is not None and cache[0] == params.k_slope:
        return cache[1]
    table = np.ascontiguousarray(
        1.0 / (1.0 + params.k_slope * landscape.slope.ravel()))
    landscape._inverse_cost_cache = (params.k_slope, table)  # type: ignore[attr-defined]
    return table


def _trip_seed(rng) -> int:
    if hasattr(rng, "getrandbits"):
        return rng.getrandbits(64)
    if hasattr(rng, "integers"):  # numpy Generator
        return int(rng.integers(0, 2 ** 63))
    return int(rng) & (2 ** 64 - 1)


def search_path(start: tuple[int, int], zones: ZoneMap, landscape: Landscape,
                rng, max_steps: int, params: FirewoodParams | None = None,
                ) -> list[tuple[int, int]]:
    """Roulette-wheel walk from `start` to any designated block.

    Step weights are 1/((1 + k_slope*slope) * diag_factor); visited cells are
    damped to discourage cycling. One 64-bit draw from `rng` seeds the trip.
    Raises NoZoneError when nothing is designated and PathTimeoutError when
    max_steps is exhausted (the trip is skipped, demand unmet that year).
    """
    p = params or FirewoodParams()
    if not zones.any_designated:
        raise NoZoneError("no designated firewood zones")
    r, c = start
    if not landscape.in_bounds(r, c):
        raise ValueError(f"start {start} out of bounds")
    w = landscape.width
    flat, n, status = run_search(
        r * w + c, zones.flat_cells(), _base_weights(landscape, p),
        landscape.height, w, max_steps, p.visited_damping, _trip_seed(rng))
    if status != 0:
        raise PathTimeoutError(f"no zone reached within {max_steps} steps")
    return [divmod(int(i), w) for i in flat[:n]]


def collect(entry: tuple[int, int], demand_kg: float, landscape: Landscape,
            rng, max_steps: int, household_id: int = -1,
            disturb_all_cells: bool = False) -> Trip:
    """Uniform random walk harvesting stock until demand is met.

    Harvests at the entry cell first, then steps to uniformly-chosen in-bounds
    8-neighbors. Each harvest decrements cell stock and resets its disturbance
    age; undershoot after max_steps is allowed and reported on the Trip.
    """
    if demand_kg < 0:
        raise ValueError("demand must be non-negative")
    r, c = entry
    if not landscape.in_bounds(r, c):
        raise ValueError(f"entry {entry} out of bounds")
    w = landscape.width
    cells, taken, n, total, status = run_collect(
        r * w + c, float(demand_kg), landscape.firewood_stock.ravel(),
        landscape.disturbance_age.ravel(), landscape.height, w,
        max_steps, disturb_all_cells, _trip_seed(rng))
    return Trip(
        household_id=household_id,
        path=[entry],
        harvested_cells=[(divmod(int(cells[k]), w), float(taken[k]))
                         for k in range(n)],
        total_kg=float(total),
        timed_out=status != 0,
    )


def run_household_trip(landscape: Landscape, zones: ZoneMap,
                       start: tuple[int, int], demand_kg: float, rng,
                       max_steps: int, params: FirewoodParams,
                       household_id: int = -1) -> float:
    """Engine fast path: search + collect without building coordinate lists.

    Returns the kilograms collected (0.0 when no zone is reachable). Behavior
    and random streams are identical to search_path followed by collect.
    """
    if not zones.any_designated:
        raise NoZoneError("no designated firewood zones")
    w = landscape.width
    flat, n, status = run_search(
        start[0] * w + start[1], zones.flat_cells(),
        _base_weights(landscape, params), landscape.height, w,
        max_steps, params.visited_damping, _trip_seed(rng))
    if status != 0:
        raise PathTimeoutError(f"no zone reached within {max_steps} steps")
    if params.disturb_path_cells:
        age = landscape.disturbance_age.ravel()
        age[flat[:n]] = 0
    _, _, _, total, _ = run_collect(
        int(flat[n - 1]), float(demand_kg), landscape.firewood_stock.ravel(),
        landscape.disturbance_age.ravel(), landscape.height, w,
        max_steps, params.disturb_path_cells, _trip_seed(rng))
    return float(total)


def replenish_stocks(landscape: Landscape, years_elapsed: int) -> Landscape:
    """Every fourth year, woody covers regrow to their reference stocks.

    Cells that left the Forest/Shrub classes keep zero stock; newly matured
    ones become harvestable at the reset.
    """
    if years_elapsed > 0 and years_elapsed % 4 == 0:
        cfg = landscape.config
        stock = landscape.firewood_stock
        stock[landscape.cover == int(Cover.FOREST)] = cfg.forest_stock_kg
        stock[landscape.cover == int(Cover.SHRUB)] = cfg.shrub_stock_kg
    return landscape


def dump_disturbance_grid(landscape: Landscape) -> str:
    """Debug dump of the disturbance state, one character per cell:
    digits 0-9 for years since disturbance, '.' for never/older."""
    horizon = 10
    age = landscape.disturbance_age
    rows = []
    for r in range(landscape.height):
        row = age[r]
        rows.append("".join(str(v) if v < horizon else "." for v in row))
    return "\n".join(rows) + "\n"
