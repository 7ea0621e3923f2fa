"""Exception hierarchy shared across the toolkit.

Each class maps to one CLI exit code so that scripted runs can tell a bad
config from an unstable step size from a failed physics pipeline.
"""


class SpinLLError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ConfigError(SpinLLError, ValueError):
    """Malformed, incomplete or inconsistent input (config files, arguments)."""

    exit_code = 2


class GuardError(SpinLLError, ValueError):
    """A numerical precondition (step size, resource cap) is violated."""

    exit_code = 3


class PipelineError(SpinLLError, RuntimeError):
    """A physics pipeline could not produce a result (e.g. a failed fit)."""

    exit_code = 4


class ParseError(ConfigError):
    """Syntax error in an operator expression, carrying the offending offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position
