"""Scenario-driven command line harness."""

from .cli import main
from .config import ConfigError, Scenario, load_scenario, parse_scenario

__all__ = ["main", "ConfigError", "Scenario", "load_scenario", "parse_scenario"]
