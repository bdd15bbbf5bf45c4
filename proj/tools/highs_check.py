#!/usr/bin/env python3
"""Re-solve exported LP files with HiGHS and compare against expected optima.

usage: highs_check.py DIR

DIR holds *.lp files and expected.json mapping file name to
{"status": "Optimal"|"Infeasible", "objective": number}.
Exit 0 when all agree, 1 on a disagreement, 77 when highspy is missing.
"""
import json
import pathlib
import sys

try:
    import highspy
except ImportError:
    print("highspy not installed", file=sys.stderr)
    sys.exit(77)


def solve(path):
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 0.0)
    h.readModel(str(path))
    h.run()
    status = h.getModelStatus()
    if status == highspy.HighsModelStatus.kOptimal:
        return "Optimal", h.getInfo().objective_function_value
    if status == highspy.HighsModelStatus.kInfeasible:
        return "Infeasible", None
    return h.modelStatusToString(status), None


def main():
    if len(sys.argv) != 2:
        print(__doc__, file=sys.stderr)
        return 2
    root = pathlib.Path(sys.argv[1])
    expected = json.loads((root / "expected.json").read_text())
    bad = 0
    for name, want in sorted(expected.items()):
        status, obj = solve(root / name)
        ok = status == want["status"] and (status != "Optimal" or obj == want["objective"])
        if not ok:
            bad += 1
            print(f"{name}: highs {status} {obj}, expected {want['status']} {want.get('objective')}")
    print(f"{len(expected) - bad}/{len(expected)} problems agree")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
