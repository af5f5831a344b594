"""Exception types shared across the harness."""

from __future__ import annotations


class VidevalError(Exception):
    """Base class for all harness errors."""


class ParseError(VidevalError):
    """A file could not be parsed; carries the offending path and line."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(prefix + message)


class ValidationError(VidevalError):
    """A record violated a schema invariant; names the record and field."""

    def __init__(self, message: str, *, record_id: str | None = None, field: str | None = None):
        self.record_id = record_id
        self.field = field
        parts = []
        if record_id is not None:
            parts.append(f"record {record_id!r}")
        if field is not None:
            parts.append(f"field {field!r}")
        suffix = f" ({', '.join(parts)})" if parts else ""
        super().__init__(message + suffix)


class ConfigurationError(VidevalError):
    """Bad wiring: unbound backend slot, unknown binding, invalid config."""


class BackendError(VidevalError):
    """A backend failed or broke its output contract for one item."""


class MetricError(VidevalError):
    """A metric could not be computed at all (e.g. no applicable items)."""

    def __init__(self, message: str, *, item_errors: tuple = ()):
        self.item_errors = tuple(item_errors)
        super().__init__(message)


class RetryableClientError(VidevalError):
    """Transient external-client failure (timeout, connection); safe to retry."""


class UndefinedCorrelationError(VidevalError):
    """Rank correlation is undefined, e.g. for a constant input vector."""
