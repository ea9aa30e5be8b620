"""Aligned plain-text table rendering for CLI and experiment output."""

from __future__ import annotations

from typing import Sequence

__all__ = ["render_table", "format_tau"]


def render_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    columns = len(headers)
    widths = [len(h) for h in headers]
    for row in rows:
        for i in range(columns):
            widths[i] = max(widths[i], len(row[i]))
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(row[i].ljust(widths[i]) for i in range(columns)).rstrip())
    return "\n".join(lines)


def format_tau(tau: float, stars: str = "") -> str:
    """Compact tau cell with significance stars attached, e.g. ``0.17***``."""
    return f"{tau:.2f}{stars}"
