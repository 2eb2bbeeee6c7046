"""Render simulation CSV/manifest outputs into figure panels.

This package consumes only the CSV tables and ``manifest.json`` files
written by the simulation CLI; it has no dependency on the engine.
"""

from .panels import (EmptyTableError, MissingColumnError, PanelSpec,
                     PlotkitError, load_table, render, render_all)

__version__ = "0.1.0"

__all__ = [
    "EmptyTableError",
    "MissingColumnError",
    "PanelSpec",
    "PlotkitError",
    "load_table",
    "render",
    "render_all",
    "__version__",
]
