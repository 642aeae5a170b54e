"""Exception types shared across the analysis pipeline.

Every user-facing diagnostic carries a source position so the CLI can
print file:line:column messages.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Pos:
    """A source position, 1-based line and column."""

    path: str
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.path}:{self.line}:{self.col}"


class CivScanError(Exception):
    """Base class for all errors raised by the analyzer."""


class DiagnosticError(CivScanError):
    """An error tied to a source position."""

    def __init__(self, pos: Pos | None, message: str):
        self.pos = pos
        self.message = message
        prefix = f"{pos}: " if pos is not None else ""
        super().__init__(prefix + message)


class LexError(DiagnosticError):
    pass


class ParseError(DiagnosticError):
    def __init__(self, pos: Pos | None, message: str, expected: tuple[str, ...] = ()):
        self.expected = expected
        if expected:
            message = f"{message} (expected one of: {', '.join(expected)})"
        super().__init__(pos, message)


class TypeCheckError(DiagnosticError):
    """Operand mismatch, unknown field, call arity mismatch."""


class ConfigError(CivScanError):
    """Malformed boundary configuration."""


class UnknownCallee(CivScanError):
    """A call target neither defined in a loaded module nor declared in config."""

    def __init__(self, name: str, pos: Pos | None = None):
        self.name = name
        self.pos = pos
        where = f" at {pos}" if pos else ""
        super().__init__(f"unknown callee '{name}'{where}")


class ModeError(CivScanError):
    """A hardening mode was requested without the artifacts it needs."""


class CorpusMismatch(CivScanError):
    """diff was asked to compare reports from different corpora."""


class MonotonicityViolation(CivScanError):
    """A hardened report shows more findings than its baseline; analyzer bug."""


class InternalInvariantError(CivScanError):
    """An internal consistency check failed; maps to CLI exit code 2."""
