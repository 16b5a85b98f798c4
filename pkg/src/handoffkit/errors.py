"""Exception hierarchy shared by every handoffkit module."""


class HandoffError(Exception):
    """Base class for all handoffkit errors."""


class InputError(HandoffError, ValueError):
    """An argument is malformed (non-finite value, mismatched features, ...)."""


class MissingContextError(HandoffError, KeyError):
    """A context variable needed by an operation is absent from the snapshot."""

    def __init__(self, variable, where=""):
        self.variable = variable
        msg = f"missing context variable {variable!r}"
        if where:
            msg += f" ({where})"
        super().__init__(msg)

    def __str__(self):
        return self.args[0]


class ConfigurationError(HandoffError, ValueError):
    """Configuration is internally inconsistent (weights, unknown variables, ...)."""


class LoadError(HandoffError):
    """A scenario file failed validation. ``location`` is a JSON-path-like string."""

    kind = "load"

    def __init__(self, message, location="$"):
        self.location = location
        super().__init__(f"{self.kind} error at {location}: {message}")


class UnknownVariableError(LoadError):
    kind = "unknown-variable"


class WeightSumError(LoadError):
    kind = "weight-sum"


class RangeError(LoadError):
    kind = "range"


class MissingSectionError(LoadError):
    kind = "missing-section"


class SchemaError(LoadError):
    kind = "schema"


class UsageError(HandoffError):
    """Bad command-line usage (unsupported sweep parameter, time out of range, ...)."""
