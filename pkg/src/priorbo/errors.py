"""Exception types shared across the package."""


class DomainError(ValueError):
    """A point, bound, or parameter lies outside its valid domain."""


class ConfigError(ValueError):
    """An experiment or prior configuration is invalid."""


class NumericalError(RuntimeError):
    """A linear-algebra routine failed beyond recoverable jitter."""


class TraceParseError(ValueError):
    """A trace or aggregate CSV file does not match the expected schema."""


class RunError(RuntimeError):
    """Every repetition of an experiment failed."""
