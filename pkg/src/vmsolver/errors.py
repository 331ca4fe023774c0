"""Exception types shared across the planner."""

from __future__ import annotations


class VmsolverError(Exception):
    """Base class for all errors raised by this package."""


class CatalogError(VmsolverError):
    """A catalog file could not be loaded or failed validation."""


class UnreadableSource(CatalogError):
    """The catalog source does not exist or is not valid JSON."""


class MissingField(CatalogError):
    def __init__(self, field: str, context: str = ""):
        self.field = field
        suffix = f" in {context}" if context else ""
        super().__init__(f"missing required field '{field}'{suffix}")


class NonPositiveValue(CatalogError):
    def __init__(self, field: str, value: object, context: str = ""):
        self.field = field
        self.value = value
        suffix = f" in {context}" if context else ""
        super().__init__(f"field '{field}' must be positive, got {value!r}{suffix}")


class DuplicateName(CatalogError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"duplicate instance name '{name}'")


class UnknownModel(VmsolverError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown model '{name}'")


class UnknownInstance(VmsolverError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown instance '{name}'")


class InvalidCoefficient(VmsolverError):
    """Offloading coefficient outside the valid range [0, 1)."""

    def __init__(self, value: float):
        self.value = value
        super().__init__(f"offloading coefficient must be in [0, 1), got {value!r}")


class InsufficientSamples(VmsolverError):
    """Fewer profiling samples than required to fit a line."""


class DegenerateDesign(VmsolverError):
    """All regressor values identical; the line fit is underdetermined."""


class SchemaError(VmsolverError):
    """A profiling or fixture file row violates the documented schema."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class DegenerateJob(VmsolverError):
    """A job with zero tokens cannot be costed."""


class DegenerateTask(VmsolverError):
    """Predicted task time is zero; throughput is undefined."""
