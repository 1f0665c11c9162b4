"""Command line entry point: render one figure from a sweep CSV."""

import argparse
import sys

from .figures import FIGURE_KINDS, render, spec_for_figure


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render a spectral-efficiency figure from simulation output.")
    parser.add_argument("--csv", required=True,
                        help="results.csv written by a simulation sweep")
    parser.add_argument("--figure", required=True, choices=FIGURE_KINDS,
                        help="which figure analogue to draw")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        spec = spec_for_figure(args.figure, args.csv, args.out)
        render(spec)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
