"""Dual-path verification of Wilson-quotient, Fermat-quotient and
Bernoulli-number congruences modulo prime powers."""

from .bernoulli import BernoulliTable, DESK_CAP
from .modular import adjusted_bernoulli_mod, bundle, power_sum_mod, sh_value
from .padic import PrimePowerContext, TrackedResidue, is_prime, ord_p, primes_up_to
from .quotients import fermat_quotient, q_sum, wilson_quotient, wilson_via_psi
from .suite import SuiteSpec, make_spec, run_suite, scan_primes

__all__ = [
    "BernoulliTable",
    "DESK_CAP",
    "PrimePowerContext",
    "SuiteSpec",
    "TrackedResidue",
    "adjusted_bernoulli_mod",
    "bundle",
    "fermat_quotient",
    "is_prime",
    "make_spec",
    "ord_p",
    "power_sum_mod",
    "primes_up_to",
    "q_sum",
    "run_suite",
    "scan_primes",
    "sh_value",
    "wilson_quotient",
    "wilson_via_psi",
]
