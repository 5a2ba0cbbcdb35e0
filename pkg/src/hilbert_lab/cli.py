"""Command-line entry point: ``hilbert-lab <command> --scene FILE``."""
from __future__ import annotations

import argparse
import sys

from .errors import HilbertLabError
from .report import COMMANDS, EXIT_ERROR, report_svg, run_command
from .scene import load_scene


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hilbert-lab", description="Hilbert geometry experiments on JSON scenes.")
    ap.add_argument("command", help=f"one of: {', '.join(COMMANDS)}")
    ap.add_argument("--scene", required=True, help="scene file (JSON)")
    ap.add_argument("--out", help="write the JSON report here instead of stdout")
    ap.add_argument("--svg", help="also write an SVG rendering (2D charts only)")
    ap.add_argument("--word-len", type=int, help="word length for orbits, limit sets and cores")
    ap.add_argument("--r", type=float, help="neighbourhood radius for isolation estimates")
    ap.add_argument("--window", type=float, help="Hilbert radius of the sampling window")
    ap.add_argument("--seed", type=int, help="random seed")
    ap.add_argument("--timing", action="store_true", help="include wall-clock time (reports stop being reproducible)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scene = load_scene(args.scene)
        report = run_command(scene, args.command, args.word_len, args.r, args.window, args.seed, args.timing)
        text = report.to_json()
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        if args.svg:
            svg = report_svg(scene, report)
            with open(args.svg, "w", encoding="utf-8") as fh:
                fh.write(svg)
    except (HilbertLabError, OSError) as exc:
        print(f"hilbert-lab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
