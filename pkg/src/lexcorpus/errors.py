"""Exception types shared across the package."""

from __future__ import annotations


class LexCorpusError(Exception):
    """Base class for all package errors."""


class MarkupParseError(LexCorpusError):
    """Raised when listing/feed/statute markup cannot be parsed.

    Carries the byte offset of the first offending position when known.
    """

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class SchemaError(LexCorpusError):
    """A Parquet directory is missing required columns."""

    def __init__(self, missing: list[str], where: str):
        super().__init__(f"missing required columns in {where}: {', '.join(missing)}")
        self.missing = missing
        self.where = where


class ValidationFailedError(LexCorpusError):
    """A write batch was rejected because records violate corpus invariants."""

    def __init__(self, violations: dict[str, list[str]]):
        lines = "; ".join(f"{key}: {', '.join(v)}" for key, v in violations.items())
        super().__init__(f"batch rejected, invalid records: {lines}")
        self.violations = violations


class InvalidQueryError(LexCorpusError):
    """A QuerySpec violates its invariants (no criteria, bad paging, ...)."""


class ConfigurationError(LexCorpusError):
    """Bad runtime configuration: unknown tokenizer scheme, broken registry, ..."""


class StoreLockedError(LexCorpusError):
    """Another writer holds the store lock."""


class UndefinedInputError(LexCorpusError):
    """A metric was asked of input it is undefined for (e.g. zero words)."""


class UnknownDatasetError(LexCorpusError):
    """An analytics call named a dataset the snapshot does not contain."""
