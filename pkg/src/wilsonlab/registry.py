"""The suite registry: every named check, engine dispatch, and gating.

A check runs at one prime (or one index, for the index-domain checks) and
returns exactly one result row. Hypothesis gates produce skipped rows so
reports show what was not claimed rather than silently omitting it. With
engine 'both', a right-hand side that is computable by both the exact
oracle and the modular engine is computed twice and any disagreement is a
loud failure; the modular path alone is authoritative only past the desk
cap of the exact table.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

from . import result
from .bernoulli import (
    BernoulliTable,
    IndexOutOfTable,
    adjusted_bernoulli,
    bernoulli_polynomial,
    beta_value,
    dn_product,
    power_sum_polynomial,
    vsc_denominator,
)
from .congruences import (
    Q_TIER_PMIN,
    WQ_TIER_PMIN,
    carlitz_check,
    central_binom_dichotomy,
    q_tier_check,
    q_tier_lhs,
    q_tier_rhs,
    qsum_beta_identity_check,
    reduction_chain_check,
    remainder_term_check,
    wilson_via_bernoulli,
)
from .modular import (
    InadmissibleCase,
    adjusted_bernoulli_mod,
    beta_mod,
    bundle,
    folklore_bernoulli_mod,
    generalized_kummer_check,
    kummer_check,
)
from .padic import PrimePowerContext, ord_p, reduce_rational
from .quotients import q_sum, wilson_quotient, wilson_via_psi
from .result import FAIL, CongruenceCheckResult

CARLITZ_INDEX_CAP = 1200
CARLITZ_PAIRS = ((1, 0), (2, 0), (3, 0), (4, 0), (1, 1), (2, 1), (1, 2))
REMAINDER_P_CAP = 31


@dataclass(frozen=True)
class RunEnv:
    engine: str = "both"  # exact | modular | both
    table: Optional[BernoulliTable] = None
    mod_exp: Optional[int] = None


@dataclass(frozen=True)
class CheckDef:
    check_id: str
    domain: str  # "prime" | "index"
    mod_exp: int
    run: Callable[[int, RunEnv], CongruenceCheckResult]
    # table index the exact side would like, given the range maximum
    oracle_index: Callable[[int, str], int] = lambda pmax, engine: 0
    index_step: int = 1  # for index-domain checks
    index_min: int = 1


@lru_cache(maxsize=1)
def _micro_table() -> BernoulliTable:
    """Tiny exact table for the p = 2, 3 special values."""
    return BernoulliTable.build(8)


def _table_for(p: int, env: RunEnv) -> Optional[BernoulliTable]:
    if p < 5:
        return _micro_table()
    return env.table


def _exact_wants(pmax: int, engine: str, factor: int, offset: int = 0) -> int:
    return 0 if engine == "modular" else factor * (pmax - 1) + offset


def _tier_bundles(p: int, r: int, env: RunEnv):
    """Bundles for each engine the selection allows, with skip reasons.

    Below p = 5 the built-in micro table is the only route and is used
    whatever the engine selection says; those are the only sub-5 values in
    the whole suite."""
    out = []
    reasons = []
    if p < 5:
        engines = ("exact",)
    else:
        engines = ("exact", "modular") if env.engine == "both" else (env.engine,)
    for eng in engines:
        if eng == "exact":
            tbl = _table_for(p, env)
            if tbl is None:
                reasons.append("no exact table")
                continue
            try:
                out.append(("exact", bundle(p, r, "exact", tbl)))
            except (IndexOutOfTable, InadmissibleCase) as exc:
                reasons.append(f"exact: {exc}")
        else:
            try:
                out.append(("modular", bundle(p, r, "modular")))
            except InadmissibleCase as exc:
                reasons.append(f"modular: {exc}")
    return out, "; ".join(reasons)


def _check_vs_bundles(check_id, p, r, lhs, env, rhs_fn) -> CongruenceCheckResult:
    """Compare a direct-oracle lhs against the tier rhs from every available
    engine; disagreement between engines is a failure in its own right."""
    bundles, why = _tier_bundles(p, r, env)
    if not bundles:
        return result.skipped(check_id, p, r, why or "no engine available")
    values = [(eng, rhs_fn(b).truncate(r)) for eng, b in bundles]
    if len(values) == 2 and values[0][1].residue != values[1][1].residue:
        return CongruenceCheckResult(
            check_id, p, r, values[0][1].residue, values[1][1].residue,
            FAIL, "cross-path mismatch (exact vs modular)",
        )
    return result.from_residues(check_id, p, r, lhs, values[0][1])


def _aggregate(check_id, p, mod_exp, rows) -> CongruenceCheckResult:
    """Collapse sub-case results: first failure wins, else last row; an
    empty list is a skip."""
    last = None
    for row in rows:
        if row.status == FAIL:
            return row
        if row.status == result.PASS:
            last = row
    if last is None:
        return result.skipped(check_id, p, mod_exp, "no admissible sub-case")
    return last


# -- classical mod-p congruences -------------------------------------------


def run_lerch(p: int, env: RunEnv) -> CongruenceCheckResult:
    if p == 2:
        return result.skipped("lerch", p, 1, "odd primes only")
    return result.from_residues(
        "lerch", p, 1, wilson_quotient(p, 1), q_sum(p, 1, 1)
    )


def _bhat_mod_p(mult: int, p: int, env: RunEnv):
    """Adjusted Bernoulli value at mult*(p-1) mod p by the selected engines."""
    rows = []
    reasons = []
    engines = ("exact", "modular") if env.engine == "both" else (env.engine,)
    for eng in engines:
        if eng == "exact":
            tbl = _table_for(p, env)
            if tbl is None or tbl.max_index < mult * (p - 1):
                reasons.append("exact oracle cap")
                continue
            ctx = PrimePowerContext(p, 1)
            rows.append(reduce_rational(adjusted_bernoulli(mult * (p - 1), p, tbl), ctx, 1))
        else:
            if p < 5:
                reasons.append("modular engine needs p >= 5")
                continue
            rows.append(adjusted_bernoulli_mod(mult, p, 1))
    return rows, "; ".join(reasons)


def run_glaisher_beeger(p: int, env: RunEnv) -> CongruenceCheckResult:
    check_id = "glaisher_beeger"
    if p < 5:
        return result.skipped(check_id, p, 1, "p >= 5")
    rhss, why = _bhat_mod_p(1, p, env)
    if not rhss:
        return result.skipped(check_id, p, 1, why)
    if len(rhss) == 2 and rhss[0].residue != rhss[1].residue:
        return CongruenceCheckResult(
            check_id, p, 1, rhss[0].residue, rhss[1].residue, FAIL,
            "cross-path mismatch",
        )
    return result.from_residues(check_id, p, 1, wilson_quotient(p, 1), rhss[0])


def run_lehmer(p: int, env: RunEnv) -> CongruenceCheckResult:
    check_id = "lehmer"
    if p < 5:
        return result.skipped(check_id, p, 1, "p >= 5")
    rows = []
    w1 = wilson_quotient(p, 1)
    for mult in (2, 3):
        rhss, _ = _bhat_mod_p(mult, p, env)
        if not rhss:
            continue
        if len(rhss) == 2 and rhss[0].residue != rhss[1].residue:
            rows.append(CongruenceCheckResult(
                check_id, p, 1, rhss[0].residue, rhss[1].residue, FAIL,
                f"cross-path mismatch at mult={mult}",
            ))
            continue
        rows.append(result.from_residues(
            check_id, p, 1, w1.scale(mult), rhss[0], f"mult={mult}"
        ))
    return _aggregate(check_id, p, 1, rows)


def run_lehmer_diff(p: int, env: RunEnv) -> CongruenceCheckResult:
    check_id = "lehmer_diff"
    if p < 5:
        return result.skipped(check_id, p, 1, "p >= 5")
    rhss = []
    reasons = []
    engines = ("exact", "modular") if env.engine == "both" else (env.engine,)
    for eng in engines:
        if eng == "exact":
            tbl = _table_for(p, env)
            if tbl is None or tbl.max_index < 2 * (p - 1):
                reasons.append("exact oracle cap")
                continue
            diff = tbl.bernoulli(2 * (p - 1)) - tbl.bernoulli(p - 1)
            rhss.append(reduce_rational(diff, PrimePowerContext(p, 1), 1))
        else:
            a = adjusted_bernoulli_mod(2, p, 1)
            b = adjusted_bernoulli_mod(1, p, 1)
            rhss.append(a - b)
    if not rhss:
        return result.skipped(check_id, p, 1, "; ".join(reasons))
    if len(rhss) == 2 and rhss[0].residue != rhss[1].residue:
        return CongruenceCheckResult(
            check_id, p, 1, rhss[0].residue, rhss[1].residue, FAIL,
            "cross-path mismatch",
        )
    return result.from_residues(check_id, p, 1, wilson_quotient(p, 1), rhss[0])


def run_carlitz(p: int, env: RunEnv) -> CongruenceCheckResult:
    check_id = "carlitz"
    if p < 5:
        return result.skipped(check_id, p, 1, "p >= 5")
    if env.table is None:
        return result.skipped(check_id, p, 1, "needs exact table")
    rows = []
    for mult, k in CARLITZ_PAIRS:
        index = mult * p ** k * (p - 1)
        if index > min(env.table.max_index, CARLITZ_INDEX_CAP):
            continue
        rows.append(carlitz_check(p, mult, k, env.table))
    return _aggregate(check_id, p, 1, rows)


# -- Wilson quotient tiers ---------------------------------------------------


def _run_wq_tier(r: int, check_id: str):
    def run(p: int, env: RunEnv) -> CongruenceCheckResult:
        if p < WQ_TIER_PMIN[r]:
            return result.skipped(check_id, p, r, f"p >= {WQ_TIER_PMIN[r]}")
        lhs = wilson_quotient(p, r)
        return _check_vs_bundles(
            check_id, p, r, lhs, env, lambda b: wilson_via_bernoulli(p, r, b)
        )

    return run


def _run_q_tier(n: int, r: int, check_id: str):
    def run(p: int, env: RunEnv) -> CongruenceCheckResult:
        if p < Q_TIER_PMIN[(n, r)]:
            return result.skipped(check_id, p, r, f"p >= {Q_TIER_PMIN[(n, r)]}")
        lhs = q_tier_lhs(p, n, r)
        return _check_vs_bundles(
            check_id, p, r, lhs, env, lambda b: q_tier_rhs(p, n, r, b)
        )

    return run


def _run_psi_tier(r: int, check_id: str):
    def run(p: int, env: RunEnv) -> CongruenceCheckResult:
        if p <= r or p == 2:
            return result.skipped(check_id, p, r, f"needs odd p > {r}")
        return result.from_residues(
            check_id, p, r, wilson_quotient(p, r), wilson_via_psi(p, r)
        )

    return run


def run_reduction_chain(p: int, env: RunEnv) -> CongruenceCheckResult:
    check_id = "reduction_chain"
    if p < 5:
        return result.skipped(check_id, p, 4, "p >= 5")
    rows = []
    engines = ("exact", "modular") if env.engine == "both" else (env.engine,)
    for eng in engines:
        if eng == "exact":
            top = 4 if p >= 7 else 3
            if env.table is None or env.table.max_index < top * (p - 1):
                continue
        try:
            rows.append(reduction_chain_check(p, eng, env.table))
        except InadmissibleCase:
            continue
    return _aggregate(check_id, p, 4, rows)


# -- Kummer families ---------------------------------------------------------


def run_kummer(p: int, env: RunEnv) -> CongruenceCheckResult:
    check_id = "kummer"
    if p < 5:
        return result.skipped(check_id, p, 1, "p >= 5")
    if env.table is None:
        return result.skipped(check_id, p, 1, "needs exact table")
    rows = []
    for n in range(2, min(p - 3, 12) + 1, 2):
        m = n + (p - 1)
        if n % (p - 1) == 0 or m > env.table.max_index:
            continue
        rows.append(kummer_check(n, m, p, env.table))
    return _aggregate(check_id, p, 1, rows)


def _run_gen_kummer(r: int, check_id: str):
    def run(p: int, env: RunEnv) -> CongruenceCheckResult:
        if p < 5:
            return result.skipped(check_id, p, r, "p >= 5")
        instances = []
        n = r + 1 + ((r + 1) % 2)  # smallest even n > r
        picked = 0
        while picked < 3:
            if n % (p - 1) != 0:
                instances.append(n)
                picked += 1
            n += 2
        for d in (1, 2):
            if p > r + d:
                instances.append(d * (p - 1))
        rows = []
        for n in instances:
            top = n + r * (p - 1)
            use_exact = env.engine != "modular" and env.table is not None and (
                top <= env.table.max_index
            )
            if use_exact:
                rows.append(generalized_kummer_check(n, p, r, env.table, "exact"))
            elif env.engine != "exact":
                try:
                    rows.append(generalized_kummer_check(n, p, r, None, "modular"))
                except InadmissibleCase:
                    continue
        return _aggregate(check_id, p, r, rows)

    return run


def run_bundle_kummer_chain(p: int, env: RunEnv) -> CongruenceCheckResult:
    check_id = "bundle_kummer_chain"
    if p < 5:
        return result.skipped(check_id, p, 1, "p >= 5")
    r = 4 if p >= 7 else 3
    bundles, why = _tier_bundles(p, r, env)
    if not bundles:
        return result.skipped(check_id, p, 1, why)
    # construction already asserts the chains; re-check explicitly so a pass
    # row shows the compared residues
    _, b = bundles[-1]
    for family in (b.bars, b.bars2):
        if not family:
            continue
        first = family[0].truncate(1)
        for v in family[1:]:
            if v.truncate(1).residue != first.residue:
                return result.from_residues(
                    check_id, p, 1, first, v.truncate(1), "chain broken"
                )
    return result.from_residues(check_id, p, 1, b.bars[0].truncate(1), b.bars[0].truncate(1))


# -- oracle-agreement checks --------------------------------------------------


def run_cor35_tiers(p: int, env: RunEnv) -> CongruenceCheckResult:
    check_id = "cor35_tiers"
    if p < 5:
        return result.skipped(check_id, p, 4, "p >= 5")
    if env.table is None:
        return result.skipped(check_id, p, 4, "needs exact table")
    rows = []
    for d in (1, 2, 3, 4):
        n = d * (p - 1)
        if n > env.table.max_index:
            continue
        exact = adjusted_bernoulli(n, p, env.table)
        for r in (1, 2, 3, 4, 5, 6):
            try:
                got = adjusted_bernoulli_mod(d, p, r, env.table)
            except InadmissibleCase:
                continue
            ctx = PrimePowerContext(p, r)
            want = reduce_rational(exact, ctx, r)
            rows.append(result.from_residues(
                check_id, p, r, got, want, f"d={d}, r={r}"
            ))
    return _aggregate(check_id, p, 4, rows)


_FOLKLORE_SAMPLE_EXTRA = (118, 242, 398)


def run_folklore(p: int, env: RunEnv) -> CongruenceCheckResult:
    check_id = "folklore"
    if p < 5:
        return result.skipped(check_id, p, 2, "p >= 5")
    if env.table is None:
        return result.skipped(check_id, p, 2, "needs exact table")
    cap = min(env.table.max_index, 400)
    sample = [m for m in range(4, 41, 2) if m <= cap]
    sample += [m for m in _FOLKLORE_SAMPLE_EXTRA if m <= cap]
    rows = []
    for m in sample:
        for K in (1, 2):
            if m % (p - 1) == 0:
                continue
            if K == 2 and (p < 7 or (m - 2) % (p - 1) == 0):
                continue
            got = folklore_bernoulli_mod(m, p, K)
            want = reduce_rational(env.table.bernoulli(m), PrimePowerContext(p, K), K)
            rows.append(result.from_residues(check_id, p, K, got, want, f"m={m}, K={K}"))
    return _aggregate(check_id, p, 2, rows)


def run_prop22(p: int, env: RunEnv) -> CongruenceCheckResult:
    check_id = "prop22"
    if p < 5:
        return result.skipped(check_id, p, 1, "p >= 5")
    if env.table is None:
        return result.skipped(check_id, p, 1, "needs exact table")
    cap = min(3 * (p - 1), 240, env.table.max_index)
    ctx = PrimePowerContext(p, 1)
    wq = wilson_quotient(p, 1)
    rows = []
    for n in range(2, cap + 1, 2):
        bhat = adjusted_bernoulli(n, p, env.table)
        o_b, o_n = ord_p(bhat, p), ord_p(n, p)
        rows.append(result.from_values(
            check_id, p, 0, min(o_b, o_n), o_n, f"ord at n={n}: {o_b} < {o_n}"
        ))
        lhs = reduce_rational(-bhat / n, ctx, 1)
        np_ = n % (p - 1)
        if np_ == 0:
            rhs = wq
        else:
            rhs = reduce_rational(-env.table.bernoulli(np_) / np_, ctx, 1)
        rows.append(result.from_residues(check_id, p, 1, lhs, rhs, f"branch at n={n}"))
    return _aggregate(check_id, p, 1, rows)


def run_prop34_remainder(p: int, env: RunEnv) -> CongruenceCheckResult:
    check_id = "prop34_remainder"
    if p < 5:
        return result.skipped(check_id, p, 0, "p >= 5")
    if p > REMAINDER_P_CAP:
        return result.skipped(check_id, p, 0, f"desk-scale gate p <= {REMAINDER_P_CAP}")
    if env.table is None or env.table.max_index < 3 * (p - 1):
        return result.skipped(check_id, p, 0, "needs exact table to 3(p-1)")
    rows = [remainder_term_check(p, d, env.table) for d in (1, 2, 3)]
    return _aggregate(check_id, p, 0, rows)


def run_lemma33(p: int, env: RunEnv) -> CongruenceCheckResult:
    check_id = "lemma33_binom"
    bad = [d for d in range(1, 3 * p + 1) if not central_binom_dichotomy(d, p)]
    if bad:
        return result.from_values(check_id, p, 0, bad[0], None, f"dichotomy fails at d={bad[0]}")
    return result.from_values(check_id, p, 0, 0, 0)


def _run_prop_identity(depth: int, check_id: str):
    def run(p: int, env: RunEnv) -> CongruenceCheckResult:
        pmin = 5 if depth == 3 else 7
        if p < pmin:
            return result.skipped(check_id, p, depth, f"p >= {pmin}")
        bundles, why = _tier_bundles(p, depth, env)
        if not bundles:
            return result.skipped(check_id, p, depth, why)
        rows = [
            qsum_beta_identity_check(p, n, depth, b)
            for n in range(1, depth + 1)
            for _, b in bundles
        ]
        return _aggregate(check_id, p, depth, rows)

    return run


def run_lemma26_qdiff(p: int, env: RunEnv) -> CongruenceCheckResult:
    check_id = "lemma26_qdiff"
    if p == 2:
        return result.skipped(check_id, p, 0, "odd primes only")
    r = env.mod_exp or 4
    rows = []
    for n in (1, 2, 3, 4):
        direct = q_sum(p, n, r, "direct")
        diff = q_sum(p, n, r, "difference")
        rows.append(result.from_residues(check_id, p, r, direct, diff, f"n={n}"))
    return _aggregate(check_id, p, r, rows)


# -- index-domain checks ------------------------------------------------------


def run_denominators_dn(n: int, env: RunEnv) -> CongruenceCheckResult:
    check_id = "denominators_dn"
    if env.table is None or env.table.max_index < n + 1:
        return result.skipped(check_id, n, 0, "needs exact table")
    tilde = bernoulli_polynomial(n, env.table).drop_constant()
    r1 = result.from_values(
        check_id, n, 0, tilde.denominator(), dn_product(n), f"denom at n={n}"
    )
    if not r1.passed:
        return r1
    spoly = power_sum_polynomial(n, env.table)
    return result.from_values(
        check_id, n, 0, spoly.denominator(), (n + 1) * dn_product(n + 1),
        f"power-sum denom at n={n}",
    )


def run_vsc(n: int, env: RunEnv) -> CongruenceCheckResult:
    check_id = "vsc"
    if env.table is None or env.table.max_index < n:
        return result.skipped(check_id, n, 0, "needs exact table")
    return result.from_values(
        check_id, n, 0, env.table.bernoulli(n).denominator, vsc_denominator(n)
    )


# -- registry -----------------------------------------------------------------


def _mk(check_id, domain, mod_exp, run, oracle_index=None, index_step=1, index_min=1):
    return CheckDef(
        check_id, domain, mod_exp, run,
        oracle_index or (lambda pmax, engine: 0), index_step, index_min,
    )


REGISTRY: dict[str, CheckDef] = {}


def _register(defn: CheckDef):
    REGISTRY[defn.check_id] = defn


_register(_mk("lerch", "prime", 1, run_lerch))
_register(_mk("glaisher_beeger", "prime", 1, run_glaisher_beeger,
              lambda pmax, e: _exact_wants(pmax, e, 1)))
_register(_mk("lehmer", "prime", 1, run_lehmer,
              lambda pmax, e: _exact_wants(pmax, e, 3)))
_register(_mk("lehmer_diff", "prime", 1, run_lehmer_diff,
              lambda pmax, e: _exact_wants(pmax, e, 2)))
_register(_mk("carlitz", "prime", 1, run_carlitz,
              lambda pmax, e: min(CARLITZ_INDEX_CAP, pmax ** 2 * (pmax - 1))))

for _r, _cid in ((1, "thm_main_p1"), (2, "thm_main_p2"), (3, "thm_main_p3"),
                 (4, "thm_main2_p4")):
    _register(_mk(_cid, "prime", _r, _run_wq_tier(_r, _cid),
                  (lambda r: lambda pmax, e: _exact_wants(pmax, e, r))(_r)))

for (_n, _r) in sorted(Q_TIER_PMIN):
    _cid = f"thm_main3_q{_n}_r{_r}"
    _register(_mk(_cid, "prime", _r, _run_q_tier(_n, _r, _cid),
                  (lambda r: lambda pmax, e: _exact_wants(pmax, e, r))(_r)))

for _r in (1, 2, 3, 4):
    _cid = f"thm_kel_psi_r{_r}"
    _register(_mk(_cid, "prime", _r, _run_psi_tier(_r, _cid)))

_register(_mk("reduction_chain", "prime", 4, run_reduction_chain,
              lambda pmax, e: _exact_wants(pmax, e, 4)))
_register(_mk("kummer", "prime", 1, run_kummer,
              lambda pmax, e: pmax - 1 + 12))

for _r in (1, 2, 3, 4):
    _cid = f"gen_kummer_r{_r}"
    _register(_mk(_cid, "prime", _r, _run_gen_kummer(_r, _cid),
                  (lambda r: lambda pmax, e: _exact_wants(pmax, e, r + 2, 12))(_r)))

_register(_mk("cor35_tiers", "prime", 4, run_cor35_tiers,
              lambda pmax, e: 4 * (pmax - 1)))
_register(_mk("prop36", "prime", 3, _run_prop_identity(3, "prop36"),
              lambda pmax, e: _exact_wants(pmax, e, 3)))
_register(_mk("prop37", "prime", 4, _run_prop_identity(4, "prop37"),
              lambda pmax, e: _exact_wants(pmax, e, 4)))
_register(_mk("prop34_remainder", "prime", 0, run_prop34_remainder,
              lambda pmax, e: 3 * (min(pmax, REMAINDER_P_CAP) - 1)))
_register(_mk("lemma33_binom", "prime", 0, run_lemma33))
_register(_mk("prop22", "prime", 1, run_prop22,
              lambda pmax, e: min(3 * (pmax - 1), 240)))
_register(_mk("folklore", "prime", 2, run_folklore,
              lambda pmax, e: 400))
_register(_mk("denominators_dn", "index", 0, run_denominators_dn,
              lambda nmax, e: nmax + 1))
_register(_mk("vsc", "index", 0, run_vsc,
              lambda nmax, e: nmax, index_step=2, index_min=2))
_register(_mk("lemma26_qdiff", "prime", 4, run_lemma26_qdiff))
_register(_mk("bundle_kummer_chain", "prime", 1, run_bundle_kummer_chain,
              lambda pmax, e: _exact_wants(pmax, e, 4)))

ALL_CHECK_IDS = tuple(sorted(REGISTRY))


def execute_check(check_id: str, value: int, env: RunEnv) -> CongruenceCheckResult:
    """Run one (check, prime-or-index) task; unexpected errors become fail
    rows carrying the error name, oracle-cap overruns become skips."""
    defn = REGISTRY[check_id]
    try:
        return defn.run(value, env)
    except IndexOutOfTable as exc:
        return result.skipped(check_id, value, defn.mod_exp, f"exact oracle cap: {exc}")
    except Exception as exc:  # noqa: BLE001 - must not kill a whole suite run
        return result.error_fail(check_id, value, defn.mod_exp, exc)
