#!/usr/bin/env python3
"""Run every registered congruence suite over a prime range and write a report.

Default scope matches the desk-scale cross-validation: all checks, both
engines, primes to 97, JSON to verification_report.json.
"""

import argparse
import sys

from wilsonlab.suite import make_spec, report_to_json, report_to_text, run_suite


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p-max", type=int, default=97)
    ap.add_argument("--engine", choices=["exact", "modular", "both"], default="both")
    ap.add_argument("--jobs", type=int, default=2)
    ap.add_argument("--out", default="verification_report.json")
    args = ap.parse_args()

    spec = make_spec("all", 2, args.p_max, engine=args.engine)
    report = run_suite(spec, jobs=args.jobs)
    with open(args.out, "w") as fh:
        fh.write(report_to_json(report))
    sys.stdout.write(report_to_text(report).splitlines()[-1] + "\n")
    print(f"report written to {args.out}")
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
