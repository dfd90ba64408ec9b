"""Rendering layer for covertjam CSV reports (figures from the CSV contract)."""

from .csvio import Report, SchemaError, read_report
from .render import FigureSpec, build_direction, build_fig3, build_fig4, render

__all__ = [
    "FigureSpec",
    "Report",
    "SchemaError",
    "build_direction",
    "build_fig3",
    "build_fig4",
    "read_report",
    "render",
]
