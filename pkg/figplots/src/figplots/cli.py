"""Command-line driver: render one panel or all panels from sweep CSVs."""

from __future__ import annotations

import argparse
import os
import sys

from .panels import PanelError, PanelSpec, panel_ids, render_panel


def cmd_render(args) -> int:
    spec = PanelSpec(args.panel, args.csv, args.out, args.format)
    print(render_panel(spec))
    return 0


def cmd_all(args) -> int:
    os.makedirs(args.out_dir, exist_ok=True)
    for panel in panel_ids():
        csv_path = os.path.join(args.csv_dir, f"{panel}.csv")
        if not os.path.exists(csv_path):
            raise PanelError(f"missing input CSV for panel {panel}: {csv_path}")
        out_path = os.path.join(args.out_dir, f"{panel}.{args.format}")
        print(render_panel(PanelSpec(panel, csv_path, out_path, args.format)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figplots",
        description="Render discrimination-game figure panels from sweep CSVs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("render", help="render one panel")
    sp.add_argument("panel", choices=panel_ids())
    sp.add_argument("--csv", required=True, help="input sweep CSV")
    sp.add_argument("--out", required=True, help="output image path")
    sp.add_argument("--format", choices=["svg", "png"], default="svg")
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("all", help="render every panel from <csv-dir>/<panel>.csv")
    sp.add_argument("--csv-dir", required=True)
    sp.add_argument("--out-dir", required=True)
    sp.add_argument("--format", choices=["svg", "png"], default="svg")
    sp.set_defaults(func=cmd_all)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PanelError as exc:
        print(f"figplots: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"figplots: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
