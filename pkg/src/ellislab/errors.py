"""Exception types shared across the package."""

from __future__ import annotations


class EllisLabError(Exception):
    """Base class for all package errors."""


class KindError(EllisLabError, TypeError):
    """A point, element or map does not belong to the expected space or family."""


class ConfigError(EllisLabError, ValueError):
    """Invalid flow descriptor or experiment configuration."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.message = message
        self.key = key
        self.line = line
        where = []
        if key:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class HorizonError(EllisLabError, ValueError):
    """A requested iterate exceeds the configured horizon cap."""


class HorizonExhausted(EllisLabError):
    """A search ran out of horizon before meeting its tolerance."""

    def __init__(self, message: str, best=None):
        self.best = best
        super().__init__(message)


class GridMismatch(EllisLabError, ValueError):
    """Two sampled maps are not defined on the same grid."""


class Inconclusive(EllisLabError):
    """The scanned window is too small to decide a property."""


class UnknownCheck(EllisLabError, KeyError):
    """No theorem check is registered under the requested id."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""
