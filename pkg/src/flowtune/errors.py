"""Shared diagnostic types for the circuit parsers."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class ParseDiagnostic:
    """One parser finding, anchored to a 1-based line number."""

    line: int
    message: str
    severity: str = "error"  # "error" | "warning"

    def __str__(self) -> str:
        return f"line {self.line}: {self.severity}: {self.message}"


class ParseError(Exception):
    """Raised when parsing fails; carries every collected diagnostic."""

    def __init__(self, diagnostics: list[ParseDiagnostic]):
        self.diagnostics = diagnostics
        head = "; ".join(str(d) for d in diagnostics[:3])
        if len(diagnostics) > 3:
            head += f" (+{len(diagnostics) - 3} more)"
        super().__init__(head)
