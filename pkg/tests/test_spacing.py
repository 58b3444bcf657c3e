import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerofree.errors import BudgetExceeded, DegeneratePhases, InvalidArgument
from zerofree.spacing import (
    enumerate_Eq,
    eq_size,
    is_prime_phases,
    prime_linear_form_exact,
    xi_bruteforce,
    xi_exact,
    xi_for,
    xi_prime_lower_bound,
)

PRIMES = [2, 3, 5, 7, 11, 13, 17, 19]


def compositions_oracle(N, q):
    return sorted((c for c in itertools.product(range(q + 1), repeat=N) if sum(c) == q),
                  reverse=True)


@pytest.mark.parametrize("N,q", [(1, 3), (2, 2), (3, 4), (4, 3), (5, 2)])
def test_enumerate_Eq_matches_product_filter(N, q):
    E = enumerate_Eq(N, q)
    assert [tuple(r) for r in E] == compositions_oracle(N, q)
    assert len(E) == eq_size(N, q)


def test_enumerate_Eq_limits():
    with pytest.raises(InvalidArgument):
        enumerate_Eq(0, 2)
    with pytest.raises(BudgetExceeded):
        enumerate_Eq(20, 20, budget=1000)


def xi_bigint_oracle(N, q):
    E = compositions_oracle(N, q)
    return min(prime_linear_form_exact(np.subtract(h, k), PRIMES[:N])
               for h, k in itertools.combinations(E, 2))


@pytest.mark.parametrize("N,q", [(2, 1), (2, 3), (3, 2), (4, 3), (5, 2), (6, 2)])
def test_xi_exact_against_bigint_oracle(N, q):
    phases = np.log(PRIMES[:N])
    assert xi_exact(phases, q) == pytest.approx(xi_bigint_oracle(N, q), rel=1e-9)
    assert xi_bruteforce(phases, q) == pytest.approx(xi_exact(phases, q), rel=1e-12)


def test_xi_small_cases_by_hand():
    # q = 1: min |log p_i - log p_j| over the first N primes
    assert xi_exact(np.log([2, 3, 5]), 1) == pytest.approx(math.log(3 / 2))
    assert xi_exact(np.log([3, 5, 7]), 1) == pytest.approx(math.log(7 / 5))
    # q = 2, N = 2: forms 2 log2, log6, 2 log3 -> min gap log(3/2)
    assert xi_exact(np.log([2, 3]), 2) == pytest.approx(math.log(1.5))
    assert xi_exact(np.log([7]), 5) == math.inf


def test_degenerate_phases():
    with pytest.raises(DegeneratePhases):
        xi_exact([1.0, 2.0, 3.0], 2)


def test_bigint_form_against_mpmath():
    mpmath.mp.dps = 60
    ell = [5, -3, 0, 2, -4]
    want = abs(sum(e * mpmath.log(p) for e, p in zip(ell, PRIMES)))
    assert prime_linear_form_exact(ell, PRIMES[:5]) == pytest.approx(float(want), rel=1e-14)


@pytest.mark.parametrize("N", range(1, 9))
@pytest.mark.parametrize("q", range(1, 5))
def test_minxi_bound(small_table, N, q):
    assert xi_exact(np.log(PRIMES[:N]), q) >= xi_prime_lower_bound(small_table, N, q)


def test_lower_bound_value(small_table):
    assert xi_prime_lower_bound(small_table, 4, 3) == float(Fraction(1, 343))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(PRIMES + [23, 29, 31]), min_size=2, max_size=5, unique=True),
       st.integers(1, 3))
def test_xi_is_min_over_pairs(ps, q):
    phases = np.log(sorted(ps))
    E = enumerate_Eq(len(ps), q)
    forms = E @ phases
    xi = xi_exact(phases, q)
    assert xi == pytest.approx(min(abs(a - b) for a, b in itertools.combinations(forms, 2)))
    assert xi >= max(ps) ** (-q)


def test_prime_phase_detection():
    assert is_prime_phases(np.log([2, 3, 5])) == [2, 3, 5]
    assert is_prime_phases(-np.log([7, 11])) == [7, 11]
    assert is_prime_phases(np.log([2, 4])) is None
    assert is_prime_phases([0.5]) is None


def test_xi_for_fallback():
    phases = np.log(PRIMES)
    assert xi_for(phases, 2)[1] == "exact"
    xi, kind = xi_for(phases, 4, budget=10)
    assert kind == "lower-bound" and xi == pytest.approx(19.0**-4)
    with pytest.raises(BudgetExceeded):
        xi_for([1.1, 2.3, 3.7], 5, budget=3)
