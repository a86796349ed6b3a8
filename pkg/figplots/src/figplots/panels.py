"""Panel definitions and rendering for discrimination-game sweep CSVs.

Each panel reads one CSV produced by the discrim3 CLI (columns theta, k,
c_mh, c_min, delta, p_dp, p_m, mode, and for the parameter sweeps s,
phi1, phi2) and renders a deterministic SVG or PNG.  No physics is
recomputed here; the scripts only plot what the CSV contains.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

# Deterministic output: fixed font, salted SVG ids, no embedded date.
matplotlib.rcParams["font.family"] = "DejaVu Sans"
matplotlib.rcParams["svg.hashsalt"] = "figplots"

PALETTE = plt.get_cmap("tab10").colors

DASHED = "--"
SOLID = "-"


class PanelError(ValueError):
    """Raised for malformed or incomplete input CSVs."""


@dataclass(frozen=True)
class Curve:
    column: str
    style: str
    label: str


@dataclass(frozen=True)
class PanelDef:
    x_column: str
    series_column: str
    curves: tuple[Curve, ...]
    xlabel: str
    ylabel: str
    title: str


def _cost_panel(title: str, scaled: bool) -> PanelDef:
    unit = "C/k" if scaled else "C"
    return PanelDef(
        x_column="k",
        series_column="theta",
        curves=(
            Curve("c_mh", DASHED, f"{unit} bound (projective)"),
            Curve("c_min", SOLID, f"{unit} min (cascade)"),
        ),
        xlabel="k",
        ylabel=unit,
        title=title,
    )


def _violation_panel(title: str, scaled: bool) -> PanelDef:
    unit = "delta C/k" if scaled else "delta C"
    return PanelDef(
        x_column="k",
        series_column="theta",
        curves=(Curve("delta", SOLID, unit),),
        xlabel="k",
        ylabel=unit,
        title=title,
    )


PANELS: dict[str, PanelDef] = {
    "fig1a": _cost_panel("Cost vs k (ideal)", scaled=False),
    "fig1b": _cost_panel("Scaled cost vs k (ideal)", scaled=True),
    "fig1c": _violation_panel("Bound violation vs k (ideal)", scaled=False),
    "fig1d": _violation_panel("Scaled bound violation vs k (ideal)", scaled=True),
    "fig1e": _cost_panel("Cost vs k (5% depolarization)", scaled=False),
    "fig1f": _cost_panel("Scaled cost vs k (5% depolarization)", scaled=True),
    "fig1g": _cost_panel("Cost vs k (2% misidentification)", scaled=False),
    "fig1h": _cost_panel("Scaled cost vs k (2% misidentification)", scaled=True),
    "fig2a": PanelDef(
        x_column="theta",
        series_column="p_dp",
        curves=(Curve("delta", SOLID, "max violation"),),
        xlabel="theta (rad)",
        ylabel="max delta C",
        title="Max violation vs theta (depolarization family)",
    ),
    "fig2b": PanelDef(
        x_column="theta",
        series_column="p_m",
        curves=(Curve("delta", SOLID, "max violation"),),
        xlabel="theta (rad)",
        ylabel="max delta C",
        title="Max violation vs theta (misidentification family)",
    ),
    "fig2c": PanelDef(
        x_column="theta",
        series_column="p_m",
        curves=(
            Curve("s", SOLID, "optimal strength s"),
            Curve("k", DASHED, "kink k_opt"),
        ),
        xlabel="theta (rad)",
        ylabel="s, k_opt",
        title="Optimal strength and kink vs theta",
    ),
    "fig2d": PanelDef(
        x_column="theta",
        series_column="p_m",
        curves=(
            Curve("phi1", SOLID, "phi1"),
            Curve("phi2", DASHED, "phi2"),
        ),
        xlabel="theta (rad)",
        ylabel="angle (rad)",
        title="Optimal measurement angles vs theta",
    ),
}


@dataclass(frozen=True)
class PanelSpec:
    panel_id: str
    csv_path: str
    out_path: str
    image_format: str = "svg"

    def __post_init__(self):
        if self.panel_id not in PANELS:
            raise PanelError(f"unknown panel id: {self.panel_id}")
        if self.image_format not in ("svg", "png"):
            raise PanelError(f"unsupported image format: {self.image_format}")


def read_table(path: str) -> dict[str, list[float]]:
    """Read a sweep CSV into float columns (the mode column is kept as text)."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise PanelError(f"zero rows in {path} (no header)")
        columns: dict[str, list] = {name: [] for name in reader.fieldnames}
        for row in reader:
            for name in reader.fieldnames:
                value = row[name]
                columns[name].append(value if name == "mode" else float(value))
    if not columns or not next(iter(columns.values())):
        raise PanelError(f"zero rows in {path}")
    return columns


def _require_columns(table: dict, names: list[str], path: str) -> None:
    for name in names:
        if name not in table:
            raise PanelError(f"missing column: {name} (in {path})")


def _series_values(table: dict, column: str) -> list[float]:
    return sorted(set(table[column]))


def render_panel(spec: PanelSpec) -> str:
    """Render one panel to spec.out_path and return that path."""
    definition = PANELS[spec.panel_id]
    table = read_table(spec.csv_path)
    needed = [definition.x_column, definition.series_column]
    needed += [curve.column for curve in definition.curves]
    _require_columns(table, needed, spec.csv_path)

    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=100)
    series_values = _series_values(table, definition.series_column)
    n = len(table[definition.x_column])
    for idx, series in enumerate(series_values):
        color = PALETTE[idx % len(PALETTE)]
        rows = [i for i in range(n) if table[definition.series_column][i] == series]
        xs = [table[definition.x_column][i] for i in rows]
        order = sorted(range(len(xs)), key=lambda j: xs[j])
        xs = [xs[j] for j in order]
        for curve in definition.curves:
            ys = [table[curve.column][rows[j]] for j in order]
            ax.plot(
                xs,
                ys,
                curve.style,
                color=color,
                linewidth=1.2,
                label=f"{curve.label}, {definition.series_column}={series:g}",
            )
    ax.set_xlabel(definition.xlabel)
    ax.set_ylabel(definition.ylabel)
    ax.set_title(definition.title)
    ax.legend(fontsize=6, ncol=2)
    fig.tight_layout()
    fig.savefig(spec.out_path, format=spec.image_format, metadata=_metadata(spec))
    plt.close(fig)
    return spec.out_path


def _metadata(spec: PanelSpec) -> dict | None:
    # Strip the creation date so repeated runs are byte-identical.
    return {"Date": None} if spec.image_format == "svg" else None


def panel_ids() -> list[str]:
    return sorted(PANELS)
