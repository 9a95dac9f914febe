"""Deterministic agent-based simulator of cooperative on-ramp merging."""

__version__ = "0.1.0"

from .scenario import Scenario, load_scenario  # noqa: F401
from .engine import run  # noqa: F401
