#!/usr/bin/env python3
"""Solve an exported MPS file with HiGHS and write `<column> <value>` lines.

Usable as the external solver command, e.g.
    python3 tools/mps_highs_solve.py {mps} {sol}
Requires the `highspy` package.
"""

import argparse
import sys

import highspy


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("mps")
    ap.add_argument("sol")
    ap.add_argument("--gap", type=float, default=1e-10)
    ap.add_argument("--time-limit", type=float, default=None)
    args = ap.parse_args()

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", args.gap)
    if args.time_limit is not None:
        h.setOptionValue("time_limit", args.time_limit)
    if h.readModel(args.mps) != highspy.HighsStatus.kOk:
        print(f"cannot read {args.mps}", file=sys.stderr)
        return 1
    h.run()

    status = h.getModelStatus()
    words = {
        highspy.HighsModelStatus.kOptimal: "optimal",
        highspy.HighsModelStatus.kInfeasible: "infeasible",
        highspy.HighsModelStatus.kUnbounded: "unbounded",
    }
    word = words.get(status, "limit")
    with open(args.sol, "w") as out:
        out.write(f"status {word}\n")
        if word in ("optimal", "limit") and h.getInfo().primal_solution_status > 0:
            lp = h.getLp()
            values = h.getSolution().col_value
            for name, v in zip(lp.col_names_, values):
                out.write(f"{name} {v:.17g}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
