"""Wilson and Fermat quotients, power sums of Fermat quotients, and the
multivariate polynomials expressing the Wilson quotient through them.

The quotient power sums Q_p(n) come by two independent methods that must
agree exactly: direct summation of n-th powers of Fermat quotients, and an
n-th forward difference of integer power sums followed by n backward shifts.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial, gcd
from typing import Sequence

from .modular import HypothesisViolated, power_sum_mod
from .padic import (
    MixedContext,
    PrimePowerContext,
    TrackedResidue,
    forward_difference,
    inv_mod,
    is_prime,
)


class NotCoprime(Exception):
    pass


def factorial_mod(p: int, K: int) -> TrackedResidue:
    """(p-1)! mod p^K by direct product."""
    if K < 1:
        raise ValueError("K must be >= 1")
    ctx = PrimePowerContext(p, K)
    m = ctx.modulus
    acc = 1
    for a in range(2, p):
        acc = acc * a % m
    return ctx.from_int(acc, K)


def wilson_quotient(p: int, r: int) -> TrackedResidue:
    """((p-1)! + 1)/p mod p^r.

    NotDivisible here would falsify Wilson's theorem, so it is allowed to
    propagate as a fatal internal error.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    f = factorial_mod(p, r + 1)
    return (f + 1).divide_by_p(1)


def fermat_quotient(a: int, p: int, r: int) -> TrackedResidue:
    """(a^(p-1) - 1)/p mod p^r for a coprime to p."""
    if gcd(a, p) != 1:
        raise NotCoprime(f"gcd({a}, {p}) != 1")
    if r < 1:
        raise ValueError("r must be >= 1")
    ctx = PrimePowerContext(p, r + 1)
    t = ctx.from_int(pow(a, p - 1, ctx.modulus), r + 1)
    return (t - 1).divide_by_p(1)


def q_sum(p: int, n: int, r: int, method: str = "direct") -> TrackedResidue:
    """Sum of n-th powers of the Fermat quotients q_p(1..p-1), mod p^r.

    method 'difference' computes the same value as the n-th forward
    difference (step p-1) of nu -> S_nu(p) at nu = 0, shifted back by p^n;
    it needs the power sums at precision r + n. Both methods agree exactly.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if n < 1 or r < 1:
        raise ValueError("need n >= 1 and r >= 1")
    if method == "direct":
        ctx = PrimePowerContext(p, r + 1)
        m_hi = ctx.modulus
        m_lo = p ** r
        acc = 0
        for a in range(1, p):
            q = (pow(a, p - 1, m_hi) - 1) // p
            acc += pow(q, n, m_lo)
        return ctx.from_int(acc, r)
    if method == "difference":
        values = [power_sum_mod(k * (p - 1), p, r + n) for k in range(n + 1)]
        return forward_difference(values).divide_by_p(n)
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class PsiPolynomial:
    """One row of the quotient-expansion table: integer polynomial in
    x_1..x_nu with no constant term, stored as (coefficient, exponent
    vector) terms."""

    nu: int
    terms: tuple[tuple[int, tuple[int, ...]], ...]

    def evaluate(self, args: Sequence[TrackedResidue]) -> TrackedResidue:
        if len(args) != self.nu:
            raise ValueError(f"need exactly {self.nu} arguments")
        ps = {a.p for a in args}
        if len(ps) > 1:
            raise MixedContext(f"mixed primes {sorted(ps)}")
        acc = None
        for coeff, exps in self.terms:
            term = None
            for x, e in zip(args, exps):
                if e == 0:
                    continue
                pw = x ** e
                term = pw if term is None else term * pw
            term = args[0].ctx.from_int(coeff, args[0].prec) if term is None else term.scale(coeff)
            acc = term if acc is None else acc + term
        return acc


# The first four expansion polynomials. These are data, not code: r > 4 has
# no table row here and requests beyond it fail instead of extrapolating.
PSI_TABLE: dict[int, PsiPolynomial] = {
    1: PsiPolynomial(1, ((1, (1,)),)),
    2: PsiPolynomial(
        2,
        (
            (2, (1, 0)),
            (-1, (2, 0)),
            (-1, (0, 1)),
        ),
    ),
    3: PsiPolynomial(
        3,
        (
            (6, (1, 0, 0)),
            (-6, (2, 0, 0)),
            (1, (3, 0, 0)),
            (3, (1, 1, 0)),
            (-3, (0, 1, 0)),
            (2, (0, 0, 1)),
        ),
    ),
    4: PsiPolynomial(
        4,
        (
            (24, (1, 0, 0, 0)),
            (-36, (2, 0, 0, 0)),
            (12, (3, 0, 0, 0)),
            (-1, (4, 0, 0, 0)),
            (-6, (2, 1, 0, 0)),
            (24, (1, 1, 0, 0)),
            (-8, (1, 0, 1, 0)),
            (-12, (0, 1, 0, 0)),
            (-3, (0, 2, 0, 0)),
            (8, (0, 0, 1, 0)),
            (-6, (0, 0, 0, 1)),
        ),
    ),
}

PSI_MAX = max(PSI_TABLE)


def psi_eval(nu: int, args: Sequence[TrackedResidue]) -> TrackedResidue:
    if nu not in PSI_TABLE:
        raise HypothesisViolated(f"no expansion polynomial for nu = {nu}")
    return PSI_TABLE[nu].evaluate(args)


def _psi_sum(p: int, r: int, p_shift: int) -> TrackedResidue:
    """sum over nu of p^(nu-1+p_shift)/nu! applied to the expansion rows.

    The quotient power sums enter at uniform precision r (cheap, and immune
    to off-by-one budgeting); nu! is a unit because p > r >= nu.
    """
    if r < 1 or r > PSI_MAX:
        raise HypothesisViolated(f"supported range is 1 <= r <= {PSI_MAX}")
    if p <= r or p == 2:
        raise HypothesisViolated(f"need an odd prime p > r, got p={p}, r={r}")
    ctx = PrimePowerContext(p, r + p_shift + 2)
    qs = [
        TrackedResidue(ctx, r, q_sum(p, nu, r).residue) for nu in range(1, r + 1)
    ]
    acc = ctx.from_int(0, ctx.working_exp)
    for nu in range(1, r + 1):
        term = psi_eval(nu, qs[:nu])
        term = term.scale(p ** (nu - 1 + p_shift))
        term = term * inv_mod(factorial(nu), ctx, term.prec)
        acc = acc + term
    return acc


def wilson_via_psi(p: int, r: int) -> TrackedResidue:
    """Wilson quotient mod p^r from quotient power sums; must equal
    wilson_quotient(p, r) whenever p > r."""
    return _psi_sum(p, r, 0).truncate(r)


def factorial_via_psi(p: int, r: int) -> TrackedResidue:
    """(p-1)! mod p^(r+1): the companion form -1 + p * (quotient expansion)."""
    return (_psi_sum(p, r, 1) - 1).truncate(r + 1)
