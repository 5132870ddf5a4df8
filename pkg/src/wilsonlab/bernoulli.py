"""Exact rational Bernoulli machinery: the slow, trusted oracle.

Everything here works in arbitrary-precision rationals (``fractions.Fraction``)
and is meant for desk-scale indices; the O(p) modular engine in
``wilsonlab.modular`` owns large primes. Sign convention: B_1 = -1/2.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import comb, lcm

from .padic import is_prime, ord_p, primes_up_to

# Exact values above this index are refused rather than silently thrashing:
# numerators grow like n log n digits and the modular engine owns that range.
DESK_CAP = 2400

TABLE_CACHE_ENV = "WILSONLAB_TABLE_CACHE"


class IndexOutOfTable(Exception):
    pass


class BadTableFile(Exception):
    pass


class BernoulliTable:
    """Cached exact Bernoulli numbers B_0..B_N."""

    def __init__(self, values: list[Fraction]):
        self._values = list(values)
        self._validate_basics()

    @classmethod
    def build(cls, n_max: int) -> "BernoulliTable":
        """Build B_0..B_n_max with the recurrence sum(C(n+1,k) B_k, k=0..n) = 0."""
        if n_max < 0:
            raise ValueError("n_max must be >= 0")
        if n_max > DESK_CAP:
            raise IndexOutOfTable(
                f"exact table capped at index {DESK_CAP}; use the modular engine"
            )
        values = [Fraction(1)]
        if n_max >= 1:
            values.append(Fraction(-1, 2))
        for n in range(2, n_max + 1):
            if n % 2:
                values.append(Fraction(0))
                continue
            # odd-index terms vanish except k = 1
            s = Fraction(comb(n + 1, 1), -2)
            for k in range(0, n, 2):
                s += comb(n + 1, k) * values[k]
            values.append(-s / (n + 1))
        return cls(values)

    def _validate_basics(self):
        v = self._values
        if not v or v[0] != 1:
            raise BadTableFile("B_0 must be 1")
        if len(v) > 1 and v[1] != Fraction(-1, 2):
            raise BadTableFile("B_1 must be -1/2")
        if len(v) > 2 and v[2] != Fraction(1, 6):
            raise BadTableFile("B_2 must be 1/6")
        for n in range(3, len(v), 2):
            if v[n] != 0:
                raise BadTableFile(f"B_{n} must vanish (odd index)")

    @property
    def max_index(self) -> int:
        return len(self._values) - 1

    def bernoulli(self, n: int) -> Fraction:
        if n < 0:
            raise ValueError("index must be >= 0")
        if n > self.max_index:
            raise IndexOutOfTable(f"B_{n} beyond table (max {self.max_index})")
        return self._values[n]

    def __len__(self):
        return len(self._values)


@dataclass(frozen=True)
class RationalPolynomial:
    """Polynomial with Fraction coefficients, ascending degree, trimmed."""

    coeffs: tuple[Fraction, ...]

    @classmethod
    def make(cls, coeffs) -> "RationalPolynomial":
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return cls(tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def drop_constant(self) -> "RationalPolynomial":
        if not self.coeffs:
            return self
        return RationalPolynomial.make((Fraction(0),) + self.coeffs[1:])

    def denominator(self) -> int:
        """LCM of the coefficient denominators (1 for the zero polynomial)."""
        d = 1
        for c in self.coeffs:
            d = lcm(d, c.denominator)
        return d

    def min_ord(self, p: int):
        """Minimum p-adic valuation over the nonzero coefficients."""
        return min((ord_p(c, p) for c in self.coeffs if c != 0), default=None)


def bernoulli_polynomial(n: int, table: BernoulliTable) -> RationalPolynomial:
    """The degree-n monic polynomial sum(C(n,k) B_{n-k} x^k, k=0..n)."""
    if n > table.max_index:
        raise IndexOutOfTable(f"index {n} beyond table")
    return RationalPolynomial.make(
        [comb(n, k) * table.bernoulli(n - k) for k in range(n + 1)]
    )


def power_sum_polynomial(n: int, table: BernoulliTable) -> RationalPolynomial:
    """Degree n+1 polynomial with S_n(m) = 1^n + ... + (m-1)^n for integer m >= 1.

    Built from both classical Bernoulli expansions, which must agree
    coefficient-wise; n >= 1 only (the n = 0 convention S_0(m) = m - 1
    is a caller-side special case, not a polynomial produced here).
    """
    if n < 1:
        raise ValueError("n must be >= 1; S_0 is a special case for callers")
    if n + 1 > table.max_index:
        raise IndexOutOfTable(f"index {n + 1} beyond table")
    via_binom = [Fraction(0)] + [
        Fraction(comb(n + 1, k), n + 1) * table.bernoulli(n + 1 - k)
        for k in range(1, n + 2)
    ]
    via_integral = [Fraction(0)] + [
        Fraction(comb(n, k - 1), k) * table.bernoulli(n - k + 1)
        for k in range(1, n + 2)
    ]
    if via_binom != via_integral:
        raise AssertionError("power-sum expansions disagree; table corrupt")
    return RationalPolynomial.make(via_binom)


def vsc_denominator(n: int) -> int:
    """Product of primes p with (p-1) | n; equals denominator of B_n for even n."""
    if n < 2 or n % 2:
        raise ValueError("n must be even and >= 2")
    out = 1
    for d in range(1, n + 1):
        if n % d == 0 and is_prime(d + 1):
            out *= d + 1
    return out


def digit_sum(n: int, p: int) -> int:
    """Sum of base-p digits of n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    s = 0
    while n:
        n, r = divmod(n, p)
        s += r
    return s


def dn_product(n: int) -> int:
    """Product of primes p <= n whose base-p digit sum of n is at least p.

    Equals the coefficient denominator of B_n(x) - B_n. Primes above n never
    qualify (their digit sum is n itself, below p), so the product is finite.
    """
    out = 1
    for p in primes_up_to(n):
        if digit_sum(n, p) >= p:
            out *= p
    return out


def adjusted_bernoulli(n: int, p: int, table: BernoulliTable) -> Fraction:
    """B_n made p-integral: 0 at n = 0; B_n + 1/p - 1 when (p-1) | n; else B_n."""
    if n == 0:
        return Fraction(0)
    if n % 2:
        raise ValueError("index must be even or 0")
    b = table.bernoulli(n)
    if n % (p - 1) == 0:
        return b + Fraction(1, p) - 1
    return b


def beta_value(n: int, p: int, table: BernoulliTable) -> Fraction:
    """Divided adjusted Bernoulli number: adjusted B_n over n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return adjusted_bernoulli(n, p, table) / n


def bar_value(d: int, p: int, table: BernoulliTable) -> Fraction:
    """(B_{d(p-1)} + 1/p - 1) / (d(p-1)).

    At p = 2 only d = 1 is defined (the odd-index value B_1 = -1/2 enters,
    giving -1). At p = 3 the value is -1/4 for d = 1; higher d use the even
    index 2d as usual.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    n = d * (p - 1)
    if p == 2:
        if d != 1:
            raise ValueError("only d = 1 is defined for p = 2")
        return (table.bernoulli(1) + Fraction(1, 2) - 1) / 1
    return beta_value(n, p, table)


def bar2_value(d: int, p: int, table: BernoulliTable) -> Fraction:
    """B_{d(p-1)-2} / (d(p-1)-2), the shifted companion of bar_value."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if p < 5:
        raise ValueError("defined for p >= 5")
    m = d * (p - 1) - 2
    return table.bernoulli(m) / m


def divided_bernoulli(kind: str, index: int, p: int, table: BernoulliTable) -> Fraction:
    """Dispatch: kind 'beta' takes a raw even index, 'bar'/'bar2' take the multiplier d."""
    if kind == "beta":
        return beta_value(index, p, table)
    if kind == "bar":
        return bar_value(index, p, table)
    if kind == "bar2":
        return bar2_value(index, p, table)
    raise ValueError(f"unknown kind {kind!r}")


# -- cache file: one value per line, "index<TAB>numerator/denominator" ----


def save_table(table: BernoulliTable, path: str) -> None:
    with open(path, "w", encoding="ascii") as fh:
        for n in range(table.max_index + 1):
            b = table.bernoulli(n)
            fh.write(f"{n}\t{b.numerator}/{b.denominator}\n")


def load_table(path: str) -> BernoulliTable:
    """Load a cache file and revalidate the table invariants.

    Checks on load: the fixed initial values, vanishing odd indices, and the
    von Staudt-Clausen denominator of every even entry. A forged or truncated
    file fails loudly instead of poisoning the oracle.
    """
    values: list[Fraction] = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            try:
                idx_s, frac_s = line.split("\t")
                num_s, den_s = frac_s.split("/")
                idx, num, den = int(idx_s), int(num_s), int(den_s)
            except ValueError as exc:
                raise BadTableFile(f"{path}:{lineno + 1}: malformed line") from exc
            if idx != len(values):
                raise BadTableFile(f"{path}:{lineno + 1}: expected index {len(values)}")
            values.append(Fraction(num, den))
    table = BernoulliTable(values)  # checks initial values and odd zeros
    for n in range(2, table.max_index + 1, 2):
        if table.bernoulli(n).denominator != vsc_denominator(n):
            raise BadTableFile(f"B_{n} violates the von Staudt-Clausen denominator")
    return table


def default_cache_path() -> str | None:
    return os.environ.get(TABLE_CACHE_ENV)
