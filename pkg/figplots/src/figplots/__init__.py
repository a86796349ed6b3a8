"""Figure rendering for discrimination-game sweep CSVs."""

from .panels import PANELS, Curve, PanelDef, PanelError, PanelSpec, panel_ids, read_table, render_panel

__version__ = "0.1.0"

__all__ = [
    "PANELS",
    "Curve",
    "PanelDef",
    "PanelError",
    "PanelSpec",
    "panel_ids",
    "read_table",
    "render_panel",
    "__version__",
]
