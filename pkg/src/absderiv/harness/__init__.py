"""Scenario runner, invariant suite and command-line interface."""
from .checks import REGISTRY, run_checks, select
from .scenario import (CheckReport, ConfigError, emit_table, load_scenario, normalize,
                       run_scenario, write_csv)

__all__ = ["REGISTRY", "run_checks", "select", "CheckReport", "ConfigError", "emit_table",
           "load_scenario", "normalize", "run_scenario", "write_csv"]
