#!/usr/bin/env python3
"""Time the O(p) modular recovery of divided Bernoulli residues against the
exact-rational oracle, across growing primes.

The point of the modular engine is that the exact route needs B_n at index
n = 4(p-1), whose cost explodes with p, while one power sum mod p^6 stays
linear in p.
"""

import argparse
import time

from wilsonlab.bernoulli import BernoulliTable
from wilsonlab.modular import bundle
from wilsonlab.padic import primes_up_to
from wilsonlab.quotients import wilson_quotient


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p-max-exact", type=int, default=149,
                    help="largest prime for the exact-oracle column")
    ap.add_argument("--p-max", type=int, default=2003)
    args = ap.parse_args()

    marks = [p for p in primes_up_to(args.p_max) if p >= 7]
    sample = [p for i, p in enumerate(marks) if i % max(1, len(marks) // 12) == 0]
    if marks[-1] not in sample:
        sample.append(marks[-1])

    print(f"{'p':>6} {'modular r=4':>12} {'factorial':>10} {'exact oracle':>13}")
    for p in sample:
        t0 = time.perf_counter()
        bundle(p, 4, "modular")
        t_mod = time.perf_counter() - t0
        t0 = time.perf_counter()
        wilson_quotient(p, 4)
        t_fact = time.perf_counter() - t0
        if p <= args.p_max_exact:
            t0 = time.perf_counter()
            table = BernoulliTable.build(4 * (p - 1))
            bundle(p, 4, "exact", table)
            t_exact = f"{time.perf_counter() - t0:10.3f}s"
        else:
            t_exact = "   (skipped)"
        print(f"{p:>6} {t_mod:10.4f}s {t_fact:8.4f}s {t_exact:>13}")


if __name__ == "__main__":
    main()
