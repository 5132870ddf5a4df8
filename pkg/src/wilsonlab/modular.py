"""The fast path: power sums mod p^K in O(p) and divided Bernoulli residues.

Adjusted Bernoulli numbers at indices d(p-1) are recovered modulo p^r from a
single O(p) power sum plus small correction terms whose inputs come from the
power-sum/Bernoulli congruence ("folklore") route. No exact rational value of
a large Bernoulli number is ever needed, which is what makes p ~ 10^4 cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from . import result
from .bernoulli import BernoulliTable, bar2_value, bar_value, beta_value
from .padic import PrimePowerContext, TrackedResidue, is_prime, reduce_rational
from .result import CongruenceCheckResult


class PreconditionViolated(Exception):
    pass


class InadmissibleCase(Exception):
    pass


class HypothesisViolated(Exception):
    pass


def power_sum_mod(n: int, p: int, K: int) -> TrackedResidue:
    """1^n + ... + (p-1)^n mod p^K, with the convention that n = 0 gives p - 1."""
    if n < 0 or K < 1:
        raise ValueError("need n >= 0 and K >= 1")
    ctx = PrimePowerContext(p, K)
    if n == 0:
        return ctx.from_int(p - 1, K)
    m = ctx.modulus
    acc = 0
    for a in range(1, p):
        acc += pow(a, n, m)
    return ctx.from_int(acc, K)


def sh_value(n: int, p: int, r: int) -> TrackedResidue:
    """(S_n(p) - S_0(p)) / p mod p^r for n >= 1.

    The division is exact precisely when (p-1) | n; other exponents raise
    NotDivisible, which callers treat as a violated congruence upstream.
    """
    if n < 1 or r < 1:
        raise ValueError("need n >= 1 and r >= 1")
    s = power_sum_mod(n, p, r + 1)
    return (s - (p - 1)).divide_by_p(1)


def folklore_bernoulli_mod(m: int, p: int, K: int) -> TrackedResidue:
    """B_m mod p^K recovered as S_m(p)/p, for K <= 2.

    K = 1 is the classical congruence S_m(p) = p B_m mod p^2 for (p-1) not
    dividing m. K = 2 is a strengthened variant needing p >= 7 and
    additionally (p-1) not dividing m-2; it is validated against the exact
    oracle over its whole admissible small range before being trusted at
    large p (see the test suite).
    """
    if K not in (1, 2):
        raise PreconditionViolated("K must be 1 or 2")
    if m < 2 or m % 2:
        raise PreconditionViolated("m must be even and >= 2")
    if p < 5:
        raise PreconditionViolated("p must be >= 5")
    if m % (p - 1) == 0:
        raise PreconditionViolated(f"(p-1) | m for p={p}, m={m}")
    if K == 2:
        if p < 7:
            raise PreconditionViolated("K = 2 needs p >= 7")
        if (m - 2) % (p - 1) == 0:
            raise PreconditionViolated(f"(p-1) | m-2 for p={p}, m={m}")
    s = power_sum_mod(m, p, K + 1)
    return s.divide_by_p(1)


def _binom_coeff_times_b(n: int, nu: int) -> Fraction:
    """C(n, nu+1) / (n - nu) as a fraction: the cofactor multiplying B_{n-nu}."""
    # C(n,nu+1) * B_{n-nu}/(n-nu) == [C(n,nu+1)/(n-nu)] * B_{n-nu}; the
    # denominator n-nu cancels into the binomial, keeping everything
    # p-integral even when p | n-nu.
    return Fraction(comb(n, nu + 1), n - nu)


def adjusted_bernoulli_mod(
    d: int, p: int, r: int, table: BernoulliTable | None = None
) -> TrackedResidue:
    """Adjusted Bernoulli number at index d(p-1), mod p^r, via one power sum.

    Admissible for p >= max(5, r+3-delta) with delta = 0 only when d >= 2
    and d = 1 mod p; r <= 6. For r <= 4 the single correction input
    B_{n-2} mod p^{r-2} comes from the folklore route and the computation
    is O(p) with no exact values at all. The r = 5, 6 rows need divided
    inputs at precision 3 and up, beyond any fast route: they require the
    exact table and exist for small p only. That restriction is deliberate
    and not silently relaxed.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if r < 1 or r > 6:
        raise InadmissibleCase("supported range is 1 <= r <= 6")
    delta = 0 if (d >= 2 and d % p == 1) else 1
    if p < max(5, r + 3 - delta):
        raise InadmissibleCase(
            f"p={p} below bound max(5, {r}+3-{delta}) for precision {r}"
        )
    n = d * (p - 1)
    ctx = PrimePowerContext(p, r + 2)
    acc = sh_value(n, p, r).lift(ctx)
    if 3 <= r <= 4:
        b2 = folklore_bernoulli_mod(n - 2, p, r - 2).lift(ctx)
        acc = acc - b2.scale_fraction(_binom_coeff_times_b(n, 2)).scale(p ** 2)
    elif r >= 5:
        if table is None or table.max_index < n - 2:
            raise InadmissibleCase(
                f"r = {r} needs exact correction inputs up to index {n - 2}"
            )
        for nu, prec in ((2, r - 2), (4, r - 4)):
            corr = _binom_coeff_times_b(n, nu) * table.bernoulli(n - nu)
            acc = acc - reduce_rational(corr, ctx, prec).scale(p ** nu)
    return acc.truncate(r)


def beta_mod(m: int, p: int, K: int) -> TrackedResidue:
    """Divided adjusted Bernoulli value at even index m, mod p^K, modular route.

    Routes: index a multiple of p-1 goes through adjusted_bernoulli_mod;
    otherwise through the folklore congruence. Extra precision is burned
    when p divides the index (the divided value stays p-integral); raises
    InadmissibleCase when no route reaches the requested precision.
    """
    if m < 2 or m % 2:
        raise ValueError("m must be even and >= 2")
    e = 0
    mm = m
    while mm % p == 0:
        mm //= p
        e += 1
    if m % (p - 1) == 0:
        d = m // (p - 1)
        num = adjusted_bernoulli_mod(d, p, K + e)
    else:
        if K + e > 2:
            raise InadmissibleCase(
                f"index {m}: needs B mod p^{K + e}, folklore route stops at p^2"
            )
        try:
            num = folklore_bernoulli_mod(m, p, K + e)
        except PreconditionViolated as exc:
            raise InadmissibleCase(f"index {m}: {exc}") from exc
    return num.divide_by_p(e).scale_fraction(Fraction(1, mm)).truncate(K)


@dataclass(frozen=True)
class DividedBernoulliBundle:
    """Divided Bernoulli residues feeding the quotient congruences.

    ``bars[d-1]`` holds the value at index d(p-1) over d(p-1), mod p^r;
    ``bars2[d-1]`` the value at index d(p-1)-2 over d(p-1)-2, at precision
    min(r, 2) (one less at p = 5, where the strengthened folklore route is
    unavailable; every consumer multiplies bars2 by p^2, so nothing is lost).
    The Kummer chains (all bars pairwise congruent mod p, likewise bars2)
    are asserted at construction.
    """

    p: int
    r: int
    bars: tuple[TrackedResidue, ...]
    bars2: tuple[TrackedResidue, ...]

    def __post_init__(self):
        for family in (self.bars, self.bars2):
            for v in family[1:]:
                if not family[0].agrees_with(v, 1):
                    raise AssertionError(
                        f"Kummer chain violated at p={self.p}: "
                        f"{family[0]} vs {v}"
                    )

    def bar(self, d: int) -> TrackedResidue:
        return self.bars[d - 1]

    def bar2(self, d: int) -> TrackedResidue:
        return self.bars2[d - 1]


def bundle_precisions(r: int, p: int) -> tuple[int, int, int]:
    """(number of bars, number of bars2, bars2 precision) for a tier-r bundle."""
    n_bars = min(max(r, 1), 4)
    n_bars2 = 2 if r >= 4 else (1 if r == 3 else 0)
    prec2 = min(r, 2) if p != 5 else min(r - 2, 2)
    return n_bars, n_bars2, prec2


def bundle(
    p: int,
    r: int = 4,
    engine: str = "modular",
    table: BernoulliTable | None = None,
) -> DividedBernoulliBundle:
    """Assemble the divided Bernoulli residues needed by a tier-r congruence.

    engine 'modular' costs O(p); engine 'exact' reduces oracle rationals and
    is the cross-check path. p in {2, 3} is exact-only and limited to r = 1.
    """
    if r < 1 or r > 4:
        raise InadmissibleCase("bundle supports 1 <= r <= 4")
    if engine == "modular":
        if p < 5:
            raise InadmissibleCase("modular engine needs p >= 5")
        if r == 4 and p < 7:
            raise InadmissibleCase("modular r = 4 needs p >= 7")
    else:
        # exact: p = 2 stops at r = 1, p = 3 at r = 2
        if (p == 2 and r > 1) or (p == 3 and r > 2):
            raise InadmissibleCase(f"r = {r} not defined at p = {p}")
    n_bars, n_bars2, prec2 = bundle_precisions(r, p)
    ctx = PrimePowerContext(p, r + 2)

    if engine == "exact":
        if table is None:
            raise ValueError("exact engine needs a Bernoulli table")
        bars = tuple(
            reduce_rational(bar_value(d, p, table), ctx, r)
            for d in range(1, n_bars + 1)
        )
        bars2 = tuple(
            reduce_rational(bar2_value(d, p, table), ctx, min(r, 2))
            for d in range(1, n_bars2 + 1)
        )
    elif engine == "modular":
        bars = []
        for d in range(1, n_bars + 1):
            bhat = adjusted_bernoulli_mod(d, p, r)
            v = bhat.scale_fraction(Fraction(1, d * (p - 1)))
            bars.append(TrackedResidue(ctx, r, v.residue))
        bars = tuple(bars)
        bars2 = []
        for d in range(1, n_bars2 + 1):
            m = d * (p - 1) - 2
            v = beta_mod(m, p, prec2)
            bars2.append(TrackedResidue(ctx, prec2, v.residue))
        bars2 = tuple(bars2)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    return DividedBernoulliBundle(p, r, bars, bars2)


# -- Kummer congruence checks --------------------------------------------


def kummer_check(n: int, m: int, p: int, table: BernoulliTable) -> CongruenceCheckResult:
    """B_n/n = B_m/m mod p for even n = m (mod p-1) not divisible by p-1."""
    if p < 5:
        raise HypothesisViolated("p must be >= 5")
    if n < 2 or m < 2 or n % 2 or m % 2:
        raise HypothesisViolated("indices must be even and >= 2")
    if (n - m) % (p - 1) != 0 or n % (p - 1) == 0:
        raise HypothesisViolated(
            f"need n = m (mod p-1) and (p-1) does not divide n; got n={n}, m={m}, p={p}"
        )
    ctx = PrimePowerContext(p, 1)
    lhs = reduce_rational(table.bernoulli(n) / n, ctx, 1)
    rhs = reduce_rational(table.bernoulli(m) / m, ctx, 1)
    return result.from_residues("kummer", p, 1, lhs, rhs, f"indices {n}, {m}")


def generalized_kummer_check(
    n: int,
    p: int,
    r: int,
    table: BernoulliTable | None = None,
    engine: str = "exact",
) -> CongruenceCheckResult:
    """r-th difference of the divided adjusted values vanishes mod p^r.

    Hypotheses (one must hold): (1) (p-1) does not divide n and n > r;
    (2) (p-1) | n and p > r + n/(p-1).
    """
    check_id = f"gen_kummer_r{r}"
    if r < 0:
        raise HypothesisViolated("r must be >= 0")
    if p < 5 or n < 2 or n % 2:
        raise HypothesisViolated("need p >= 5 and even n >= 2")
    cond1 = n % (p - 1) != 0 and n > r
    cond2 = n % (p - 1) == 0 and p > r + n // (p - 1)
    if not (cond1 or cond2):
        raise HypothesisViolated(f"neither hypothesis holds for n={n}, p={p}, r={r}")
    if r == 0:
        return result.from_values(check_id, p, 0, 0, 0)
    ctx = PrimePowerContext(p, r + 1)
    indices = [n + k * (p - 1) for k in range(r + 1)]
    if engine == "exact":
        if table is None:
            raise ValueError("exact engine needs a Bernoulli table")
        diff = Fraction(0)
        for k, idx in enumerate(indices):
            diff += comb(r, k) * (-1) ** (r - k) * beta_value(idx, p, table)
        lhs = reduce_rational(diff, ctx, r)
    else:
        values = [beta_mod(idx, p, r) for idx in indices]
        acc = None
        for k, v in enumerate(values):
            t = v.scale(comb(r, k) * (-1) ** (r - k))
            acc = t if acc is None else acc + t
        lhs = acc
    return result.from_residues(
        check_id, p, r, lhs.truncate(r), ctx.from_int(0, r), f"start index {n}"
    )
