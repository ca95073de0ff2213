"""Desk-scale coupled human-nature policy simulator and analysis toolkit."""

from .config import RunConfig, load_config
from .engine import run_replicate, run_scenario, run_sweep
from .policy import PolicyScenario, scenario_grid

__version__ = "0.1.0"

__all__ = [
    "PolicyScenario",
    "RunConfig",
    "load_config",
    "run_replicate",
    "run_scenario",
    "run_sweep",
    "scenario_grid",
    "__version__",
]
