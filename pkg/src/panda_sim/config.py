"""Run configuration: every tunable of the simulator and the analysis toolkit.

All knobs live in plain dataclasses so a run can be described by a single JSON
file and hashed for reproducibility. Defaults are calibrated for the synthetic
100x100 world; anything marked "calibration" below is a modelling convention,
not a measured quantity, and is meant to be overridden for sensitivity runs.

Unknown keys in a config file are rejected (typos must not silently fall back
to defaults).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

# One 90 m x 90 m cell in Mu (1 Mu = 0.067 ha, i.e. 670 m^2).
MU_PER_CELL = 8100.0 / 670.0

STANDARD_ELECTRICITY_PRICE = 0.65  # CNY/kWh, the unsubsidized tariff


class ConfigurationError(ValueError):
    """Raised for invalid or unknown configuration input."""


@dataclass
class WorldConfig:
    """Synthetic landscape generator settings (raster of 90 m cells)."""

    width: int = 100
    height: int = 100
    farmland_fraction: float = 0.10
    forest_fraction: float = 0.45
    shrub_fraction: float = 0.15
    grassland_fraction: float = 0.10
    bamboo_fraction: float = 0.10
    builtup_fraction: float = 0.01
    n_settlements: int = 3
    noise_sigma: float = 3.0          # smoothing radius of the slope noise field
    valley_halfwidth: int = 12        # cells over which the stream flattens slopes
    max_slope_deg: float = 60.0

    # Vegetation succession dwell times (years in class before advancing).
    dwell_grassland: int = 3
    dwell_shrub: int = 5

    # Firewood stock initialisation. Forest sustains a household roughly four
    # years, so forest stock = 4 x reference annual household demand.
    forest_stock_kg: float = 8000.0
    shrub_stock_kg: float = 4000.0

    # Habitat suitability curves (placeholder defaults, overridable).
    slope_flat_deg: float = 15.0
    slope_steep_deg: float = 45.0
    access_radius_cells: float = 10.0   # roads / farmland / settlements avoidance
    stream_peak_cells: float = 5.0
    stream_falloff_cells: float = 15.0
    bamboo_radius_cells: float = 10.0
    disturbance_horizon_years: int = 4
    disturbance_cover_penalty: float = 0.5
    habitat_weights: tuple[float, ...] = (
        1 / 7, 1 / 7, 1 / 7, 1 / 7, 1 / 7, 1 / 7, 1 / 7,
    )
    cover_suitability: dict[str, float] = field(default_factory=lambda: {
        "forest": 1.0,
        "bamboo": 1.0,
        "shrub": 0.6,
        "grassland": 0.4,
        "farmland": 0.1,
        "water": 0.0,
        "builtup": 0.0,
        "bare": 0.0,
    })

    def validate(self) -> None:
        if self.width < 20 or self.height < 20:
            raise ConfigurationError("world dimensions must be at least 20x20")
        fractions = (
            self.farmland_fraction + self.forest_fraction + self.shrub_fraction
            + self.grassland_fraction + self.bamboo_fraction + self.builtup_fraction
        )
        if fractions > 1.0 + 1e-9:
            raise ConfigurationError(f"cover fractions sum to {fractions:.3f} > 1")
        if min(self.farmland_fraction, self.forest_fraction, self.shrub_fraction,
               self.grassland_fraction, self.bamboo_fraction, self.builtup_fraction) < 0:
            raise ConfigurationError("cover fractions must be non-negative")
        if self.n_settlements < 1:
            raise ConfigurationError("at least one settlement is required")
        if abs(sum(self.habitat_weights) - 1.0) > 1e-9 or min(self.habitat_weights) < 0:
            raise ConfigurationError("habitat weights must be non-negative and sum to 1")


@dataclass
class DemographyRates:
    """Annual lifecycle probabilities (base-model rates are unpublished)."""

    birth_rate: float = 0.012            # per married woman aged 20-45 per year
    death_rate_under_60: float = 0.002
    death_rate_60_plus: float = 0.03
    marriage_rate: float = 0.06          # per eligible single adult per year
    out_migration_rate: float = 0.005    # per adult per year

    def validate(self) -> None:
        for name in ("birth_rate", "death_rate_under_60", "death_rate_60_plus",
                     "marriage_rate", "out_migration_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigurationError(f"demography.{name} must be in [0, 1], got {v}")


@dataclass
class PopulationConfig:
    """Initial population synthesis."""

    n_households: int = 100
    mean_household_size: float = 4.0
    profit_max_share: float = 0.7        # remainder are leisure maximizers
    rooms_min: int = 3
    rooms_max: int = 8
    room_area_units_per_room: float = 0.2   # 20 m^2 per room, in 100 m^2 units
    capital_median: float = 40_000.0
    capital_sigma: float = 0.6

    def validate(self) -> None:
        if self.n_households < 1:
            raise ConfigurationError("population.n_households must be >= 1")
        if not 0.0 <= self.profit_max_share <= 1.0:
            raise ConfigurationError("population.profit_max_share must be in [0, 1]")


@dataclass
class BusinessParams:
    """Linear per-unit business returns with caps."""

    agriculture_return_per_mu: float = 3000.0   # CNY/Mu/yr net
    agriculture_labor_per_mu: float = 0.3       # labor-units per cultivated Mu
    tempjob_return_per_labor: float = 12_000.0  # CNY per labor-unit per year
    tempjob_labor_cap: float = 2.0
    lodging_return_per_room: float = 20_000.0   # CNY/room/yr, gated on F2E
    lodging_labor_per_room: float = 0.5
    lodging_capital_threshold: float = 50_000.0

    def validate(self) -> None:
        for f in dataclasses.fields(self):
            if getattr(self, f.name) < 0:
                raise ConfigurationError(f"business.{f.name} must be non-negative")


@dataclass
class EconomyParams:
    """Decision-rule calibration for policy participation and planning."""

    risk_premium: float = 0.5
    baseline_income: float = 15_000.0     # leisure maximizers' floor, CNY/yr
    productivity_sigma: float = 0.35      # lognormal(0, sigma) household draw
    # Opportunity-cost basis of the G2G reservation price: farm profit per Mu
    # net of the outside wage the tied-up labor could earn. Calibrated so the
    # reservation distribution straddles the 0-2000 CNY/Mu lattice.
    g2g_opportunity_profit_per_mu: float = 800.0
    # F2E adoption: imputed cost of firewood labor vs. electric replacement.
    collection_hours_per_kg: float = 0.025
    opportunity_wage_per_hour: float = 30.0
    f2e_cost_margin: float = 0.9

    def validate(self) -> None:
        if self.productivity_sigma < 0:
            raise ConfigurationError("economy.productivity_sigma must be >= 0")


@dataclass
class EnergyCoefficients:
    """Log-linear demand model coefficients (total energy / electricity)."""

    tend_constant: float = 6.069
    tend_household_type: float = 0.205
    tend_room_area: float = 0.050
    tend_rooms: float = 0.009
    teld_constant: float = 5.684
    teld_room_area: float = 0.072
    teld_business: float = 0.447
    teld_household_type: float = 0.216
    log_base: float = 10.0
    # Converts model output to kWh-equivalent/yr. Calibrated so a one-business
    # household with 4 rooms (0.8 area units) demands ~6,000 kWh-eq/yr.
    demand_unit_scale: float = 6000.0 / 10 ** 6.35
    price_elasticity: float = 0.8
    standard_price: float = STANDARD_ELECTRICITY_PRICE
    kwh_per_kg_firewood: float = 2.25

    def validate(self) -> None:
        if self.log_base <= 1.0:
            raise ConfigurationError("energy.log_base must be > 1")
        if self.demand_unit_scale <= 0:
            raise ConfigurationError("energy.demand_unit_scale must be > 0")


@dataclass
class CarbonFactors:
    """CO2 emission factors (2008 national calculator values)."""

    firewood_kg_co2_per_kg: float = 1.4375
    electricity_kg_co2_per_kwh: float = 0.96

    def validate(self) -> None:
        if self.firewood_kg_co2_per_kg < 0 or self.electricity_kg_co2_per_kwh < 0:
            raise ConfigurationError("carbon factors must be non-negative")


@dataclass
class FirewoodParams:
    """Two-step collection: zone designation, path search, random-walk harvest."""

    block_size: int = 5
    zone_threshold_kg: float | None = None  # None -> 0.25 x forest_stock_kg
    k_slope: float = 0.1                    # step-cost slope coefficient, 1/degree
    visited_damping: float = 0.25
    max_steps: int | None = None            # None -> 4 x (width + height)
    disturb_path_cells: bool = False        # transit cells count as disturbance

    def validate(self) -> None:
        if self.block_size < 1:
            raise ConfigurationError("firewood.block_size must be >= 1")
        if not 0.0 < self.visited_damping <= 1.0:
            raise ConfigurationError("firewood.visited_damping must be in (0, 1]")

    def resolved_threshold(self, forest_stock_kg: float) -> float:
        if self.zone_threshold_kg is not None:
            return self.zone_threshold_kg
        return 0.25 * forest_stock_kg

    def resolved_max_steps(self, width: int, height: int) -> int:
        if self.max_steps is not None:
            return self.max_steps
        return 4 * (width + height)


@dataclass
class ScenarioLattice:
    """Policy grid: compensation levels x subsidized electricity prices."""

    g2g_min: float = 0.0
    g2g_max: float = 2000.0
    g2g_step: float = 100.0
    f2e_max: float = STANDARD_ELECTRICITY_PRICE
    f2e_min: float = 0.05
    f2e_step: float = 0.05

    def validate(self) -> None:
        if self.g2g_step <= 0 or self.f2e_step <= 0:
            raise ConfigurationError("lattice steps must be positive")
        if self.g2g_max < self.g2g_min or self.f2e_max < self.f2e_min:
            raise ConfigurationError("lattice bounds are inverted")
        if self.f2e_max > STANDARD_ELECTRICITY_PRICE + 1e-9:
            raise ConfigurationError(
                f"f2e prices cannot exceed the standard {STANDARD_ELECTRICITY_PRICE} CNY/kWh"
            )


@dataclass
class RunConfig:
    """Everything needed to reproduce a sweep byte-for-byte."""

    world: WorldConfig = field(default_factory=WorldConfig)
    demography: DemographyRates = field(default_factory=DemographyRates)
    population: PopulationConfig = field(default_factory=PopulationConfig)
    business: BusinessParams = field(default_factory=BusinessParams)
    economy: EconomyParams = field(default_factory=EconomyParams)
    energy: EnergyCoefficients = field(default_factory=EnergyCoefficients)
    carbon: CarbonFactors = field(default_factory=CarbonFactors)
    firewood: FirewoodParams = field(default_factory=FirewoodParams)
    lattice: ScenarioLattice = field(default_factory=ScenarioLattice)
    n_years: int = 14
    start_year: int = 2010
    n_replicates: int = 30
    base_seed: int = 42
    common_random_numbers: bool = True

    def validate(self) -> None:
        self.world.validate()
        self.demography.validate()
        self.population.validate()
        self.business.validate()
        self.economy.validate()
        self.energy.validate()
        self.carbon.validate()
        self.firewood.validate()
        self.lattice.validate()
        if self.n_years < 1:
            raise ConfigurationError("n_years must be >= 1")
        if self.n_replicates < 1:
            raise ConfigurationError("n_replicates must be >= 1")

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def config_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


_SECTION_TYPES = {
    "world": WorldConfig,
    "demography": DemographyRates,
    "population": PopulationConfig,
    "business": BusinessParams,
    "economy": EconomyParams,
    "energy": EnergyCoefficients,
    "carbon": CarbonFactors,
    "firewood": FirewoodParams,
    "lattice": ScenarioLattice,
}


def _dataclass_from_dict(cls: type, data: dict[str, Any], path: str) -> Any:
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path or 'config'} must be an object, got {type(data).__name__}")
    known = {f.name: f for f in dataclasses.fields(cls)}
    kwargs: dict[str, Any] = {}
    for key, value in data.items():
        here = f"{path}.{key}" if path else key
        if key not in known:
            raise ConfigurationError(f"unknown config key '{here}'")
        ftype = known[key].type
        if key in _SECTION_TYPES:
            kwargs[key] = _dataclass_from_dict(_SECTION_TYPES[key], value, here)
        elif isinstance(ftype, str) and ftype.startswith("tuple"):
            kwargs[key] = tuple(value)
        else:
            kwargs[key] = value
    return cls(**kwargs)


def config_from_dict(data: dict[str, Any]) -> RunConfig:
    """Build and validate a RunConfig from a plain dict (e.g. parsed JSON)."""
    cfg = _dataclass_from_dict(RunConfig, data, "")
    cfg.validate()
    return cfg


def load_config(path: str | Path) -> RunConfig:
    """Read a JSON config file; parse errors keep their line/column info."""
    p = Path(path)
    if not p.exists():
        raise ConfigurationError(f"config file not found: {p}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"{p}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return config_from_dict(data)
