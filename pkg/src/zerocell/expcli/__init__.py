"""Configuration-driven experiment runner and CLI."""

from .commands import cmd_law, cmd_rates, cmd_simulate, cmd_threshold_sweep
from .config import ConfigError, ExperimentConfig, load, loads
from .selftest import run_selftest

__all__ = ["ConfigError", "ExperimentConfig", "cmd_law", "cmd_rates", "cmd_simulate",
           "cmd_threshold_sweep", "load", "loads", "run_selftest"]
