"""Command line entry: plot.py <figure-kind> <inputs...> -o <out>.

Figure kinds:

    decay_loglog   one or more decay CSVs ("T,tail_norm" or
                   "t,masked_norm,total_norm,ratio"); requires --delta for
                   the predicted reference slope (1 - delta or -delta)
    phase_heatmap  one .wpf field file; optional --mask-a / --mask-R draw
                   the mask boundary
    verdict_panel  one classifier CSV
                   ("t,mask_a,mask_R,masked_norm,ratio,verdict_contrib")

Schema mismatches exit nonzero with the column difference on stderr and
write no output file.
"""

from __future__ import annotations

import argparse
import sys

from .figures import SchemaError, decay_loglog, phase_heatmap, verdict_panel


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot.py", description="render figures from experiment artifacts"
    )
    parser.add_argument(
        "kind", choices=["decay_loglog", "phase_heatmap", "verdict_panel"]
    )
    parser.add_argument("inputs", nargs="+", help="input artifact paths")
    parser.add_argument("-o", "--output", required=True, help="output figure path")
    parser.add_argument(
        "--delta", type=float, help="potential decay exponent for the reference slope"
    )
    parser.add_argument("--mask-a", type=float, help="frequency mask boundary |xi| = a")
    parser.add_argument("--mask-R", type=float, help="position mask boundary |x| = R")
    args = parser.parse_args(argv)

    try:
        if args.kind == "decay_loglog":
            if args.delta is None:
                parser.error("decay_loglog requires --delta")
            decay_loglog(args.inputs, args.output, args.delta)
        elif args.kind == "phase_heatmap":
            if len(args.inputs) != 1:
                parser.error("phase_heatmap takes exactly one field file")
            phase_heatmap(args.inputs[0], args.output, args.mask_a, args.mask_R)
        else:
            if len(args.inputs) != 1:
                parser.error("verdict_panel takes exactly one CSV")
            verdict_panel(args.inputs[0], args.output)
    except SchemaError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
