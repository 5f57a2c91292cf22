"""Deterministic report rendering: CSV rows and an aligned text table."""

from __future__ import annotations

import io

from ..metrics import CATEGORIES, LEVELS
from .runner import EvalRunReport


def _fmt(v: float) -> str:
    return f"{v:.4f}"


def render_report(report: EvalRunReport, fmt: str = "csv") -> str:
    if fmt == "csv":
        return _render_csv(report)
    if fmt == "text":
        return _render_text(report)
    raise ValueError(f"unknown report format {fmt!r}")


def _render_csv(report: EvalRunReport) -> str:
    out = io.StringIO()
    out.write("metric,level,category,mean,std,n\n")
    table = report.table
    for metric in table.metrics():
        for level in LEVELS:
            cell = table.cell(metric, "level", str(level))
            if cell:
                out.write(f"{metric},{level},,{_fmt(cell.mean)},{_fmt(cell.std)},{cell.n}\n")
        for category in CATEGORIES:
            cell = table.cell(metric, "category", category)
            if cell:
                out.write(f"{metric},,{category},{_fmt(cell.mean)},{_fmt(cell.std)},{cell.n}\n")
        cell = table.cell(metric, "all", "all")
        if cell:
            out.write(f"{metric},,,{_fmt(cell.mean)},{_fmt(cell.std)},{cell.n}\n")
    return out.getvalue()


def _render_text(report: EvalRunReport) -> str:
    """Metrics as rows, reasoning levels as columns, mean±std cells; a
    trailing overall column for the flat mean±std layout."""
    table = report.table
    headers = ["metric"] + [f"L{lv}" for lv in LEVELS] + ["all"]
    rows = [headers]
    for metric in table.metrics():
        row = [metric]
        for lv in LEVELS:
            cell = table.cell(metric, "level", str(lv))
            row.append(f"{_fmt(cell.mean)}±{_fmt(cell.std)}" if cell else "-")
        cell = table.cell(metric, "all", "all")
        row.append(f"{_fmt(cell.mean)}±{_fmt(cell.std)}" if cell else "-")
        rows.append(row)
    widths = [max(len(r[i]) for r in rows) for i in range(len(headers))]
    lines = []
    for r in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
    errors = [r for r in report.results if r.error]
    if errors:
        lines.append("")
        lines.append("errors:")
        for r in errors:
            lines.append(f"  {r.sample_id}: {r.error}")
    return "\n".join(lines) + "\n"
