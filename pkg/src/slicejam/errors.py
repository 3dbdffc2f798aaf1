"""Exception types shared across the simulator.

ConfigError maps to CLI exit code 1, SimulationError to exit code 2.
"""


class ConfigError(ValueError):
    """Invalid scenario, learning, attack, or defense configuration."""


class SimulationError(RuntimeError):
    """An internal invariant was violated; the run must abort."""
