"""Scenario configs, Monte-Carlo sweeps, the power oracle, timing and figure presets."""

from .bench import run_bench
from .config import ConfigError, ScenarioConfig, load_config
from .oracle import run_oracle
from .sweep import ResultRow, aggregate, hash64, run_sweep, trial_seed

__all__ = [
    "ConfigError",
    "ResultRow",
    "ScenarioConfig",
    "aggregate",
    "hash64",
    "load_config",
    "run_bench",
    "run_oracle",
    "run_sweep",
    "trial_seed",
]
