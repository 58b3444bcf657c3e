"""Multi-index sets E_q and the linear-spacing coefficient xi(N, q)."""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import BudgetExceeded, DegeneratePhases, InvalidArgument, RangeExceedsTable
from .primes import PrimeTable

DEFAULT_BUDGET = 10**6
ZERO_TOL = 1e-13


def eq_size(N: int, q: int) -> int:
    return math.comb(q + N - 1, N - 1)


def _compositions(N: int, q: int):
    # descending lexicographic: (q, 0, ..., 0) first
    if N == 1:
        yield (q,)
        return
    for first in range(q, -1, -1):
        for rest in _compositions(N - 1, q - first):
            yield (first,) + rest


def enumerate_Eq(N: int, q: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """All compositions of q into N nonnegative parts, one per row.

    Rows come in descending lexicographic order, (q, 0, ..., 0) first.
    """
    if N < 1 or q < 1:
        raise InvalidArgument("N and q must be positive")
    size = eq_size(N, q)
    if size > budget:
        raise BudgetExceeded(f"|E_q| = {size} exceeds budget {budget}")
    return np.array(list(_compositions(N, q)), dtype=np.int64).reshape(size, N)


def xi_exact(phases, q: int, budget: int = DEFAULT_BUDGET) -> float:
    """min over distinct h, k in E_q of |sum_n (h_n - k_n) phi_n|.

    The linear forms l_k = sum k_n phi_n are sorted and the smallest adjacent
    gap is the minimum over all unordered pairs. Linear independence of the
    phases is assumed, not tested; a minimum below 1e-13 raises
    DegeneratePhases. Returns inf when E_q has a single element (N = 1).
    """
    phases = np.asarray(phases, dtype=float)
    E = enumerate_Eq(len(phases), q, budget)
    if len(E) < 2:
        return math.inf
    forms = np.sort(E @ phases)
    xi = float(np.min(np.diff(forms)))
    if xi < ZERO_TOL:
        raise DegeneratePhases(
            f"linear form vanishes to {xi:.3g}: phases look rationally dependent")
    return xi


def xi_bruteforce(phases, q: int, budget: int = DEFAULT_BUDGET) -> float:
    """Pair-by-pair version of xi_exact, quadratic in |E_q|."""
    phases = np.asarray(phases, dtype=float)
    E = enumerate_Eq(len(phases), q, budget)
    best = math.inf
    for h, k in combinations(range(len(E)), 2):
        best = min(best, abs(float((E[h] - E[k]) @ phases)))
    return best


def xi_prime_lower_bound(table: PrimeTable, N: int, q: int) -> float:
    """p_N^{-q}, the lower bound for xi with phases log p_1, ..., log p_N."""
    if N < 1:
        raise InvalidArgument("N must be positive")
    if N > len(table):
        raise RangeExceedsTable(f"table holds only {len(table)} primes")
    return float(Fraction(1, table.nth(N) ** q))


def prime_linear_form_exact(ell, primes) -> float:
    """|sum ell_n log p_n| computed as log(P+/P-) from exact integer products."""
    plus = 1
    minus = 1
    for e, p in zip(ell, primes):
        e = int(e)
        if e > 0:
            plus *= int(p) ** e
        elif e < 0:
            minus *= int(p) ** (-e)
    if plus < minus:
        plus, minus = minus, plus
    # log1p of an exactly rounded ratio avoids cancellation between two large logs
    return math.log1p(float(Fraction(plus - minus, minus)))


def _isprime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def is_prime_phases(phases, rtol: float = 1e-12):
    """Return the primes p with |phi| = log p, or None if the phases are not of that form."""
    out = []
    for phi in np.abs(np.asarray(phases, dtype=float)):
        p = int(round(math.exp(phi)))
        if p < 2 or abs(math.log(p) - phi) > rtol * max(1.0, phi) or not _isprime(p):
            return None
        out.append(p)
    return out


def xi_for(phases, q: int, budget: int = DEFAULT_BUDGET) -> tuple[float, str]:
    """xi exactly when E_q fits the budget, else the prime lower bound P^{-q}.

    P is the largest prime among the phases; the bound only enlarges any
    right-hand side that divides by xi. Returns (xi, "exact" | "lower-bound").
    """
    try:
        return xi_exact(phases, q, budget), "exact"
    except BudgetExceeded:
        primes = is_prime_phases(phases)
        if primes is None:
            raise
        return float(Fraction(1, max(primes) ** q)), "lower-bound"
