import numpy as np
import pytest

from panda_sim.config import (
    PopulationConfig,
    RunConfig,
    ScenarioLattice,
    WorldConfig,
)
from panda_sim.engine import run_sweep, write_sweep


def smoke_config(n_replicates: int = 3) -> RunConfig:
    """Small world for fast engine-level tests; same mechanics as default."""
    cfg = RunConfig(
        world=WorldConfig(width=40, height=40, n_settlements=2),
        population=PopulationConfig(n_households=30),
        n_replicates=n_replicates,
        base_seed=7,
    )
    cfg.validate()
    return cfg


@pytest.fixture(scope="session")
def small_run_config() -> RunConfig:
    return smoke_config()


@pytest.fixture(scope="session")
def full_grid_sweep(tmp_path_factory):
    """One small-world sweep over the full 273-scenario lattice, reused by
    analysis / bundle / CLI tests. Returns (SweepResult, csv_path)."""
    cfg = smoke_config(n_replicates=2)
    sweep = run_sweep(cfg, workers=1)
    out = tmp_path_factory.mktemp("sweep")
    csv_path, _ = write_sweep(sweep, out)
    return sweep, csv_path


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
