"""Exception hierarchy shared by every module."""

from __future__ import annotations


class ClcaError(Exception):
    """Base class for all engine errors."""


class InputError(ClcaError, ValueError):
    """A value supplied by the user cannot be interpreted."""


class RecordError(ClcaError, ValueError):
    """A survey record is internally inconsistent."""

    def __init__(self, message: str, record_id: object = None):
        super().__init__(message if record_id is None else f"record {record_id}: {message}")
        self.record_id = record_id


class ConfigurationError(ClcaError):
    """Required reference data (kinematics, profiles, factors) is missing."""


class DomainError(ClcaError, ValueError):
    """A numeric argument lies outside the domain of the operation."""


class EmptyInputError(ClcaError, ValueError):
    pass


class DegenerateInfrastructureError(ClcaError, ValueError):
    """No record on an infrastructure carries positive weighted traffic."""


class UndefinedShareError(ClcaError, ValueError):
    pass


class NoBreakEvenError(ClcaError):
    pass


class MissingFactorError(ClcaError, KeyError):
    def __init__(self, flows):
        self.flows = tuple(flows)
        super().__init__("no characterization factor for: " + ", ".join(self.flows))

    def __str__(self) -> str:
        return self.args[0]


class SchemaError(ClcaError):
    """A data file violates its tabular schema."""

    def __init__(self, path, row: int | None, column: str | None, message: str):
        self.path = str(path)
        self.row = row
        self.column = column
        where = self.path
        if row is not None:
            where += f", row {row}"
        if column is not None:
            where += f", column '{column}'"
        super().__init__(f"{where}: {message}")


class LinkError(ClcaError):
    """A dataset refers to a mode or identifier that no other dataset defines."""
