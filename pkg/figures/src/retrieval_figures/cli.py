"""Command-line figure generation from cavity-retrieval CSV files.

Exit codes: 0 success, 1 bad specification or malformed input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import (HEATMAP, PHASE_PANEL, TRAJECTORY_OVERLAY, FigureSpec,
                     RenderError, render)

HEATMAP_VALUES = ("eta", "chi", "chi_eta", "delta_opt_MHz", "nu_opt_MHz")


def _parse_range(text):
    lo, hi = text.split(":")
    return (float(lo), float(hi))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="retrieval-figures",
        description="Render heatmaps, phase panels and trajectory overlays "
                    "from cavity-retrieval CSV output")
    sub = parser.add_subparsers(dest="command", required=True)

    heat = sub.add_parser(HEATMAP, help="sweep-table column over the grid")
    heat.add_argument("--in", dest="input_path", required=True)
    heat.add_argument("--out", dest="output_path", required=True)
    heat.add_argument("--value", choices=HEATMAP_VALUES, default="eta")
    heat.add_argument("--title", default="")

    phase = sub.add_parser(PHASE_PANEL, help="field and LO phase curves")
    phase.add_argument("--in", dest="input_path", required=True)
    phase.add_argument("--out", dest="output_path", required=True)
    phase.add_argument("--title", default="")

    traj = sub.add_parser(TRAJECTORY_OVERLAY,
                          help="|E|, |P| and the scaled drive envelope")
    traj.add_argument("--in", dest="input_path", required=True)
    traj.add_argument("--out", dest="output_path", required=True)
    traj.add_argument("--title", default="")

    allcmd = sub.add_parser("all", help="every figure a sweep CSV supports, "
                            "plus optional phase/trajectory panels")
    allcmd.add_argument("--sweep", required=True)
    allcmd.add_argument("--phase", default=None)
    allcmd.add_argument("--trajectory", default=None)
    allcmd.add_argument("--out-dir", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "all":
            out = Path(args.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            for value in HEATMAP_VALUES:
                result = render(FigureSpec(kind=HEATMAP, input_path=args.sweep,
                                           output_path=str(out / f"{value}.png"),
                                           value=value))
                note = result.diagnostics.get("antisymmetry_defect")
                extra = f" (antisymmetry defect {note:.2e})" if note is not None else ""
                print(f"{result.path}{extra}")
            if args.phase:
                print(render(FigureSpec(kind=PHASE_PANEL, input_path=args.phase,
                                        output_path=str(out / "phase.png"))).path)
            if args.trajectory:
                print(render(FigureSpec(
                    kind=TRAJECTORY_OVERLAY, input_path=args.trajectory,
                    output_path=str(out / "trajectory.png"))).path)
            return 0
        spec = FigureSpec(kind=args.command, input_path=args.input_path,
                          output_path=args.output_path,
                          value=getattr(args, "value", "eta"),
                          title=args.title)
        result = render(spec)
        print(result.path)
        return 0
    except RenderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
