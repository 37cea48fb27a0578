"""Shared exception types and the desk-scale enumeration budget."""

from __future__ import annotations

import os

DEFAULT_ENUM_LIMIT = 1 << 22
ENUM_LIMIT_ENV = "PRPD_ENUM_LIMIT"


class PrpdError(Exception):
    """Base class for every error raised by this package."""


class InputError(PrpdError, ValueError):
    """An argument violates a documented precondition."""


class ParseError(PrpdError, ValueError):
    """Malformed text input; records where parsing stopped."""

    def __init__(self, message: str, line: int | None = None, field: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", field {field}" if field is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.field = field


class CapacityError(PrpdError):
    """An enumeration would exceed the configured budget.

    Exact verification refuses outright instead of silently subsampling;
    callers that want an estimate must subsample explicitly.
    """


class ContractError(PrpdError):
    """A value was used without the certificate or shape its consumer requires."""


class ConstructionError(PrpdError):
    """A construction hypothesis failed; the message names the inequality."""


def enum_limit() -> int:
    raw = os.environ.get(ENUM_LIMIT_ENV)
    if raw is None:
        return DEFAULT_ENUM_LIMIT
    try:
        return int(raw)
    except ValueError as exc:
        raise InputError(f"{ENUM_LIMIT_ENV} must be an integer, got {raw!r}") from exc


def check_capacity(count: int, what: str) -> None:
    limit = enum_limit()
    if count > limit:
        raise CapacityError(
            f"{what} needs {count} evaluations, over the limit {limit} "
            f"(set {ENUM_LIMIT_ENV} to override)"
        )
