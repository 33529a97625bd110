"""Deterministic CSV-to-figure rendering for experiment result tables."""

from .errors import MissingColumn, NoData, PlotkitError
from .render import PlotSpec, build_svg, read_rows, render

__version__ = "0.1.0"

__all__ = [
    "MissingColumn",
    "NoData",
    "PlotkitError",
    "PlotSpec",
    "build_svg",
    "read_rows",
    "render",
    "__version__",
]
