"""
Exception hierarchy shared by the simulation services and the CLI.
"""

# CLI exit codes (0 on success)
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class SimulationError(Exception):
    """Base class for every error raised by the simulator."""

    exit_code = EXIT_USAGE


class InvalidParameterError(SimulationError, ValueError):
    """A physical or numerical parameter is out of its allowed range."""


class InvalidDimensionError(SimulationError, ValueError):
    """A Fock truncation or array dimension is unusable."""


class InvalidStateError(SimulationError, ValueError):
    """A state cannot be built (all-zero factor, wrong length...)."""


class UnknownScenarioError(SimulationError, LookupError):
    """No scenario or figure is registered under the requested label."""


class ConfigError(SimulationError):
    """A run configuration could not be read or did not validate."""


class ContractViolation(SimulationError):
    """A numerical contract (hermiticity, normalization, truncation...) broke."""

    exit_code = EXIT_NUMERICAL
