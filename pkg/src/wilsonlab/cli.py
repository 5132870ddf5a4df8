"""Command-line harness.

Subcommands: verify (suite runs over a prime range), wilson and qsum
(single values by any method), bernoulli (exact table, optionally cached),
scan (prime classes), dn (polynomial denominator product). Exit codes:
0 success, 1 at least one check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .bernoulli import (
    DESK_CAP,
    BernoulliTable,
    IndexOutOfTable,
    default_cache_path,
    dn_product,
    load_table,
    save_table,
)
from .congruences import InadmissibleTier, q_sum_via_bernoulli, wilson_via_bernoulli
from .modular import HypothesisViolated, InadmissibleCase, bundle
from .quotients import q_sum, wilson_quotient, wilson_via_psi
from .registry import ALL_CHECK_IDS
from .suite import (
    UnknownCheck,
    UnknownRange,
    make_spec,
    report_to_csv,
    report_to_json,
    report_to_text,
    run_suite,
    scan_primes,
)

USAGE_ERROR = 2


def _load_or_build_table(n_max: int, cache: str | None) -> BernoulliTable:
    path = cache or default_cache_path()
    if path and os.path.exists(path):
        table = load_table(path)
        if table.max_index >= n_max:
            return table
    table = BernoulliTable.build(n_max)
    if path:
        save_table(table, path)
    return table


def cmd_verify(args) -> int:
    try:
        spec = make_spec(args.suite, args.p_min, args.p_max, args.mod_exp, args.engine)
    except (UnknownCheck, UnknownRange) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    report = run_suite(spec, jobs=args.jobs)
    if args.format == "json":
        out = report_to_json(report)
    elif args.format == "csv":
        out = report_to_csv(report)
    else:
        out = report_to_text(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out if out.endswith("\n") else out + "\n")
    return 0 if report.ok else 1


def cmd_wilson(args) -> int:
    p, r = args.p, args.mod_exp
    try:
        if args.method == "direct":
            value = wilson_quotient(p, r)
        elif args.method == "psi":
            value = wilson_via_psi(p, r)
        else:
            engine = "modular" if p >= 5 else "exact"
            table = _load_or_build_table(4 * (p - 1), None) if engine == "exact" else None
            value = wilson_via_bernoulli(p, r, bundle(p, r, engine, table))
    except (HypothesisViolated, InadmissibleCase, InadmissibleTier) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    print(f"W_{p} = {value.residue} (mod {p}^{r})")
    return 0


def cmd_qsum(args) -> int:
    p, n, r = args.p, args.n, args.mod_exp
    try:
        if args.method in ("direct", "difference"):
            value = q_sum(p, n, r, args.method)
        else:
            tier = r + n - 1
            engine = "modular" if p >= 7 else "exact"
            table = None
            if engine == "exact":
                table = _load_or_build_table(max(4, tier) * (p - 1), None)
            value = q_sum_via_bernoulli(p, n, tier, bundle(p, tier, engine, table))
    except (HypothesisViolated, InadmissibleCase, InadmissibleTier) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    print(f"Q_{p}({n}) = {value.residue} (mod {p}^{value.prec})")
    return 0


def cmd_bernoulli(args) -> int:
    if args.max_index > DESK_CAP:
        print(f"error: exact table capped at index {DESK_CAP}", file=sys.stderr)
        return USAGE_ERROR
    table = _load_or_build_table(args.max_index, args.cache)
    for i in range(args.max_index + 1):
        b = table.bernoulli(i)
        print(f"{i}\t{b.numerator}/{b.denominator}")
    return 0


def cmd_scan(args) -> int:
    try:
        primes = scan_primes(args.klass, args.limit)
    except IndexOutOfTable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    for p in primes:
        print(p)
    return 0


def cmd_dn(args) -> int:
    print(dn_product(args.n))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wilsonlab",
        description="verify Wilson/Fermat-quotient and Bernoulli congruences "
        "modulo prime powers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a check suite over a prime range")
    v.add_argument("--suite", default="all",
                   help="check id, comma list, or 'all' (ids: %s)" % ", ".join(ALL_CHECK_IDS))
    v.add_argument("--p-min", type=int, default=2)
    v.add_argument("--p-max", type=int, default=97)
    v.add_argument("--mod-exp", type=int, default=None)
    v.add_argument("--engine", choices=["exact", "modular", "both"], default="both")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--format", choices=["json", "csv", "text"], default="text")
    v.add_argument("--out", default=None)
    v.set_defaults(fn=cmd_verify)

    w = sub.add_parser("wilson", help="Wilson quotient modulo p^r")
    w.add_argument("--p", type=int, required=True)
    w.add_argument("--mod-exp", type=int, default=1)
    w.add_argument("--method", choices=["direct", "psi", "bernoulli"], default="direct")
    w.set_defaults(fn=cmd_wilson)

    q = sub.add_parser("qsum", help="power sum of Fermat quotients modulo p^r")
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--mod-exp", type=int, default=1)
    q.add_argument("--method", choices=["direct", "difference", "bernoulli"],
                   default="direct")
    q.set_defaults(fn=cmd_qsum)

    b = sub.add_parser("bernoulli", help="exact Bernoulli numbers up to an index")
    b.add_argument("--max-index", type=int, required=True)
    b.add_argument("--cache", default=None,
                   help="cache file (default: $WILSONLAB_TABLE_CACHE)")
    b.set_defaults(fn=cmd_bernoulli)

    s = sub.add_parser("scan", help="scan for a prime class")
    s.add_argument("--class", dest="klass", choices=["wilson", "irregular"],
                   required=True)
    s.add_argument("--limit", type=int, required=True)
    s.set_defaults(fn=cmd_scan)

    d = sub.add_parser("dn", help="denominator product of the shifted Bernoulli polynomial")
    d.add_argument("--n", type=int, required=True)
    d.set_defaults(fn=cmd_dn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
