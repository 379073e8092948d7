"""Exact arithmetic for wreath actions on restricted products over
projective planes: biregularity, proximal dynamics and fixed points."""

from .pipeline import Scenario, classify_projection, decide_scenario, purely_elliptic_check
from .scenario import ScenarioError, format_scenario, load_scenario, parse_scenario

__version__ = "0.1.0"

__all__ = [
    "Scenario", "ScenarioError", "classify_projection", "decide_scenario",
    "format_scenario", "load_scenario", "parse_scenario", "purely_elliptic_check",
]
