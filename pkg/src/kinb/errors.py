"""Exception taxonomy shared across kinb.

Exit-code mapping used by the command line interface:
  ConfigError        -> 1  (bad configuration, unusable input files)
  NumericalFailure   -> 2  (instability, under-resolution, failed guard)
  property suites    -> 3  (a randomized check found a counterexample)
"""

from __future__ import annotations

__all__ = ["KinbError", "ConfigError", "NumericalFailure"]


class KinbError(Exception):
    """Base class for kinb-specific failures."""


class ConfigError(KinbError):
    """Invalid configuration, schema violation, or unusable input file."""


class NumericalFailure(KinbError):
    """Numerical guard tripped: instability, NaN, or under-resolution."""
