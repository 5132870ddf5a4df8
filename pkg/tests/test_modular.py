from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from wilsonlab.bernoulli import adjusted_bernoulli, beta_value, power_sum_polynomial
from wilsonlab.modular import (
    HypothesisViolated,
    InadmissibleCase,
    PreconditionViolated,
    adjusted_bernoulli_mod,
    beta_mod,
    bundle,
    folklore_bernoulli_mod,
    generalized_kummer_check,
    kummer_check,
    power_sum_mod,
    sh_value,
)
from wilsonlab.padic import NotDivisible, PrimePowerContext, primes_up_to, reduce_rational


def test_power_sum_examples():
    assert power_sum_mod(0, 5, 1).residue == 4
    assert power_sum_mod(4, 5, 4).residue == 354
    assert power_sum_mod(1, 7, 2).residue == 21


@given(
    st.sampled_from((3, 5, 7, 11, 13)),
    st.integers(min_value=1, max_value=20),
    st.integers(min_value=1, max_value=4),
)
@settings(max_examples=60, deadline=None)
def test_power_sum_matches_brute_force(p, n, K):
    got = power_sum_mod(n, p, K)
    assert got.prec == K
    assert got.residue == sum(a ** n for a in range(1, p)) % p ** K


@pytest.mark.parametrize("p", (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31))
def test_power_sum_matches_polynomial(table, p):
    for n in range(1, 51):
        poly_value = power_sum_polynomial(n, table)(p)
        for K in (1, 3, 5):
            assert power_sum_mod(n, p, K).residue == poly_value % p ** K, (n, K)


def test_sh_value_examples():
    v = sh_value(4, 5, 2)
    assert (v.residue, v.prec) == (20, 2)
    # exponent not a multiple of p-1: the defining division must fail
    with pytest.raises(NotDivisible):
        sh_value(3, 7, 2)


@pytest.mark.parametrize("p", (5, 7, 11))
@pytest.mark.parametrize("d", (1, 2, 3))
def test_sh_value_brute_force(p, d):
    n = d * (p - 1)
    s = sum(a ** n for a in range(1, p))
    want = (s - (p - 1)) // p
    got = sh_value(n, p, 3)
    assert got.residue == want % p ** 3


def test_folklore_fixed_points(table):
    assert folklore_bernoulli_mod(4, 7, 2).residue == 31
    b10 = folklore_bernoulli_mod(10, 7, 1)
    assert b10.residue == reduce_rational(
        Fraction(5, 66), PrimePowerContext(7, 1), 1
    ).residue
    with pytest.raises(PreconditionViolated):
        folklore_bernoulli_mod(4, 5, 1)  # (p-1) | m
    with pytest.raises(PreconditionViolated):
        folklore_bernoulli_mod(8, 5, 2)  # K = 2 needs p >= 7
    with pytest.raises(PreconditionViolated):
        folklore_bernoulli_mod(14, 13, 2)  # (p-1) | m-2


def test_folklore_agrees_with_oracle_dense(table):
    """The strengthened K = 2 route is trusted only because of this sweep."""
    for p in primes_up_to(31):
        if p < 5:
            continue
        for m in range(4, 101, 2):
            if m % (p - 1) == 0:
                continue
            ctx = PrimePowerContext(p, 2)
            assert folklore_bernoulli_mod(m, p, 1).residue == reduce_rational(
                table.bernoulli(m), ctx, 1
            ).residue
            if p >= 7 and (m - 2) % (p - 1) != 0:
                assert folklore_bernoulli_mod(m, p, 2).residue == reduce_rational(
                    table.bernoulli(m), ctx, 2
                ).residue


def test_adjusted_mod_fixed_points():
    assert adjusted_bernoulli_mod(1, 5, 2).residue == 20
    assert adjusted_bernoulli_mod(1, 5, 1).residue == sh_value(4, 5, 1).residue


def test_adjusted_mod_gates():
    with pytest.raises(InadmissibleCase):
        adjusted_bernoulli_mod(1, 5, 4)  # r = 4 needs p >= 7
    with pytest.raises(InadmissibleCase):
        adjusted_bernoulli_mod(1, 7, 7)
    with pytest.raises(InadmissibleCase):
        adjusted_bernoulli_mod(1, 7, 5)  # r = 5 needs exact correction inputs


@pytest.mark.parametrize("p", (5, 7, 11, 13, 17))
@pytest.mark.parametrize("d", (1, 2, 3, 4))
def test_adjusted_mod_agrees_with_oracle(table, p, d):
    exact = adjusted_bernoulli(d * (p - 1), p, table)
    for r in range(1, 7):
        try:
            got = adjusted_bernoulli_mod(d, p, r, table)
        except InadmissibleCase:
            continue
        ctx = PrimePowerContext(p, r)
        assert got.residue == reduce_rational(exact, ctx, r).residue, (p, d, r)


def test_adjusted_mod_delta_zero_case(table):
    """d = 1 mod p with d >= 2 weakens the admissible range by one power."""
    p, d = 5, 6
    exact = adjusted_bernoulli(d * (p - 1), p, table)
    for r in (1, 2):
        got = adjusted_bernoulli_mod(d, p, r)
        assert got.residue == reduce_rational(exact, PrimePowerContext(p, r), r).residue
    with pytest.raises(InadmissibleCase):
        adjusted_bernoulli_mod(d, p, 3)  # delta = 0: p >= r+3 fails


@pytest.mark.parametrize("p", (7, 11, 13))
def test_beta_mod_routes(table, p):
    ctx2 = PrimePowerContext(p, 2)
    for m in (p - 3, 2 * p - 4, p - 1, 2 * (p - 1), 4 * (p - 1)):
        got = beta_mod(m, p, 2)
        want = reduce_rational(beta_value(m, p, table), ctx2, 2)
        assert got.residue == want.residue, m


def test_beta_mod_p_divides_index(table):
    # index 2p(p-1)/2... pick m = p(p-1): burning one precision unit works at K=1
    p = 7
    m = p * (p - 1)
    got = beta_mod(m, p, 1)
    want = reduce_rational(beta_value(m, p, table), PrimePowerContext(p, 1), 1)
    assert got.residue == want.residue


def test_bundle_fixed_points(table):
    b7 = bundle(7, 4, "modular")
    assert b7.bar2(1).residue % 49 == 20
    b7e = bundle(7, 4, "exact", table)
    for d in (1, 2, 3, 4):
        assert b7.bar(d).residue == b7e.bar(d).residue
    for d in (1, 2):
        assert b7.bar2(d).truncate(2).residue == b7e.bar2(d).truncate(2).residue
    b5 = bundle(5, 3, "exact", table)
    assert b5.bar(1).residue == reduce_rational(
        Fraction(-5, 24), PrimePowerContext(5, 3), 3
    ).residue


def test_bundle_gates():
    with pytest.raises(InadmissibleCase):
        bundle(5, 4, "modular")
    with pytest.raises(InadmissibleCase):
        bundle(3, 2, "modular")
    with pytest.raises(InadmissibleCase):
        bundle(2, 2, "exact", None)


@pytest.mark.parametrize("p", (7, 11, 13, 23))
def test_bundle_kummer_chain(p):
    b = bundle(p, 4, "modular")
    first = b.bars[0].truncate(1).residue
    assert all(v.truncate(1).residue == first for v in b.bars)
    f2 = b.bars2[0].truncate(1).residue
    assert all(v.truncate(1).residue == f2 for v in b.bars2)


def test_kummer_examples(table):
    assert kummer_check(2, 6, 5, table).passed
    assert kummer_check(6, 6, 5, table).passed
    with pytest.raises(HypothesisViolated):
        kummer_check(4, 8, 5, table)


def test_kummer_sweep(table):
    for p in (5, 7, 11, 13):
        for n in range(2, p - 3 + 1, 2):
            assert kummer_check(n, n + (p - 1), p, table).passed


def test_generalized_kummer_examples(table):
    # second difference at 6, 10, 14 for p = 5 has valuation exactly 2
    assert (
        beta_value(6, 5, table)
        - 2 * beta_value(10, 5, table)
        + beta_value(14, 5, table)
        == Fraction(50, 693)
    )
    assert generalized_kummer_check(6, 5, 2, table).passed
    assert generalized_kummer_check(4, 5, 1, table).passed
    assert generalized_kummer_check(6, 5, 0, table).passed
    with pytest.raises(HypothesisViolated):
        generalized_kummer_check(2, 5, 2, table)  # n > r fails
    with pytest.raises(HypothesisViolated):
        generalized_kummer_check(4 * 4, 5, 2, table)  # p > r + n/(p-1) fails


@pytest.mark.parametrize("p", (7, 11, 13, 19))
@pytest.mark.parametrize("r", (1, 2, 3, 4))
def test_generalized_kummer_box(table, p, r):
    for n in (r + 2 - r % 2, p - 1, 2 * (p - 1)):
        n += n % 2
        cond1 = n % (p - 1) != 0 and n > r
        cond2 = n % (p - 1) == 0 and p > r + n // (p - 1)
        if not (cond1 or cond2) or n + r * (p - 1) > table.max_index:
            continue
        assert generalized_kummer_check(n, p, r, table).passed, (p, r, n)


@pytest.mark.parametrize("p", (7, 11, 13))
def test_generalized_kummer_modular_matches_exact(table, p):
    for r in (1, 2, 3, 4):
        for d in (1, 2):
            if p <= r + d:
                continue
            n = d * (p - 1)
            a = generalized_kummer_check(n, p, r, table, "exact")
            b = generalized_kummer_check(n, p, r, None, "modular")
            assert a.passed and b.passed
