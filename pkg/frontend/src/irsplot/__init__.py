"""Plotting companion for the simulation harness.

Reads the CSV/JSON files written by the `simulate` command and renders
the spectral-efficiency figures.
"""

from .figures import (
    FIGURE_KINDS,
    SE_COLUMN,
    STATUS_COLUMN,
    FigureSpec,
    aggregate,
    load_rows,
    render,
    spec_for_figure,
)

__all__ = [
    "FIGURE_KINDS",
    "SE_COLUMN",
    "STATUS_COLUMN",
    "FigureSpec",
    "aggregate",
    "load_rows",
    "render",
    "spec_for_figure",
]
