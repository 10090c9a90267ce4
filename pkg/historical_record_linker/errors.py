"""Exception hierarchy for the record linkage engine."""

from typing import Optional


class LinkageError(Exception):
    """Base class for every error raised by the engine."""


class DateParseError(LinkageError, ValueError):
    """An event date could not be parsed."""

    def __init__(self, raw: str, field: str, message: str):
        self.raw = raw
        self.field = field
        super().__init__(f"Invalid date '{raw}': {field} {message}")


class ConfigError(LinkageError, ValueError):
    """A configuration value is out of range or malformed."""


class RuleConfigError(ConfigError):
    """A ruleset file or rule definition is invalid."""


class CorpusLoadError(LinkageError):
    """A corpus file could not be read or lacks a required column."""

    def __init__(self, path: str, message: str, column: Optional[str] = None):
        self.path = path
        self.column = column
        detail = f" (column '{column}')" if column else ""
        super().__init__(f"{path}{detail}: {message}")


class ResultWriteError(LinkageError):
    """A result file could not be written."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"Failed to write {path}: {message}")


class SameEventError(LinkageError, ValueError):
    """Relationship support was requested for two mentions of one event."""


class ScoringError(LinkageError):
    """Predicted sets reference records missing from the truth file."""


class GenParamsError(LinkageError, ValueError):
    """Synthetic corpus parameters are infeasible."""
