"""Desk-scale verification toolkit for prime Dirichlet-polynomial zero-free region arguments."""

__version__ = "0.1.0"

from .dirichlet import (  # noqa: E402
    DirichletPoly,
    SupCertificate,
    certified_sup,
    derivative_bound,
    evaluate,
    evaluate_shifted,
    family_sup,
    metric_d,
    prime_sum,
)
from .primes import PrimeTable, log_phases, primes_in, sieve  # noqa: E402

__all__ = [
    "DirichletPoly", "SupCertificate", "PrimeTable", "certified_sup", "derivative_bound",
    "evaluate", "evaluate_shifted", "family_sup", "log_phases", "metric_d", "prime_sum",
    "primes_in", "sieve",
]
