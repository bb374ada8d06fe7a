"""Visualization-state engine and chart-recreation evaluation toolkit."""

from vizstate.spec_model import (
    FigureSpec,
    parse_figure,
    resolve_defaults,
    serialize_figure,
)

__version__ = "0.1.0"

__all__ = ["FigureSpec", "parse_figure", "resolve_defaults", "serialize_figure"]
