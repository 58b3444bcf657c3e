import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerofree.dirichlet import (
    DirichletPoly,
    certified_sup,
    derivative_bound,
    evaluate,
    evaluate_shifted,
    family_sup,
    max_admissible_subsum,
    metric_d,
    prime_sum,
    reduced_phase,
)
from zerofree.errors import BudgetExceeded, InvalidArgument

mpmath.mp.dps = 50


def mp_reduced(t, phi):
    x = mpmath.mpf(t) * mpmath.mpf(phi)
    two_pi = 2 * mpmath.pi
    return float(x - two_pi * mpmath.nint(x / two_pi))


@pytest.mark.parametrize("t", [0.0, 1.5, 1e6, 2.0**40 + 0.3, 1e15, -7.25e12])
@pytest.mark.parametrize("p", [2, 3, 97, 999_983])
def test_reduced_phase_against_mpmath(t, p):
    phi = math.log(p)
    got = float(reduced_phase(t, phi))
    want = mp_reduced(t, phi)
    # compare on the circle
    assert abs(math.remainder(got - want, 2 * math.pi)) < 4e-15 * max(1.0, abs(t * phi) / 1e15)


@settings(max_examples=200, deadline=None)
@given(st.floats(-1e14, 1e14), st.floats(0.5, 20))
def test_reduced_phase_property(t, phi):
    got = float(reduced_phase(t, phi))
    assert abs(got) <= math.pi + 1e-9
    assert abs(math.remainder(got - mp_reduced(t, phi), 2 * math.pi)) < 1e-14


def test_evaluate_direct_sum():
    rng = np.random.default_rng(1)
    phases = rng.uniform(-5, 5, 7)
    coeffs = rng.normal(size=7) + 1j * rng.normal(size=7)
    poly = DirichletPoly(phases, coeffs)
    t = rng.uniform(-50, 50, 40)
    direct = np.exp(1j * np.outer(t, phases)) @ coeffs
    np.testing.assert_allclose(evaluate(poly, t), direct, atol=1e-12)
    assert isinstance(poly(0.0), complex)
    assert poly(0.0) == pytest.approx(coeffs.sum())


def test_shifted_large_theta_against_mpmath():
    poly = DirichletPoly.over_primes([2, 3, 5, 7], [1, 2j, -1, 0.5], sign=-1.0)
    theta = 2.0**45
    t = np.array([0.0, 0.25, 1.0])
    got = evaluate_shifted(poly, theta, t)
    for ti, g in zip(t, got):
        want = sum(complex(c) * complex(mpmath.exp(-1j * (mpmath.mpf(theta) + mpmath.mpf(ti))
                                                   * mpmath.mpf(math.log(p))))
                   for p, c in zip([2, 3, 5, 7], [1, 2j, -1, 0.5]))
        # theta + t and log p are both taken as doubles, so agree to phase rounding only
        assert abs(g - want) < 1e-9


def test_poly_validation():
    with pytest.raises(InvalidArgument):
        DirichletPoly([1.0, 1.0], [1, 2])
    with pytest.raises(InvalidArgument):
        DirichletPoly([1.0, 2.0], [1])


def test_prime_sum(small_table):
    assert prime_sum(small_table, 2, 7, 0.0) == pytest.approx(4)
    tau = 3.7
    want = sum(p ** (-1j * tau) for p in [11, 13, 17, 19])
    assert prime_sum(small_table, 10, 20, tau) == pytest.approx(want, abs=1e-12)
    assert prime_sum(small_table, 24, 28, 1.0) == 0


def test_metric_d_single_term():
    poly = DirichletPoly([2.0], [3.0])
    s, t = 0.1, 0.9
    assert metric_d(poly, s, t) == pytest.approx(math.sqrt(2 * 9 * math.sin(0.8) ** 2))
    # |P(t) - P(s)|^2 equals 2 d^2 for a single term
    assert abs(poly(t) - poly(s)) ** 2 == pytest.approx(2 * metric_d(poly, s, t) ** 2)


def test_derivative_bound():
    poly = DirichletPoly([1.0, -3.0], [2.0, 1j])
    assert derivative_bound(poly) == pytest.approx(5.0)


@pytest.mark.parametrize("seed", range(5))
def test_certified_sup_encloses_fine_grid(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 21))
    poly = DirichletPoly(rng.uniform(0, 8, n) + np.arange(n) * 1e-3,
                         rng.normal(size=n) + 1j * rng.normal(size=n))
    cert = certified_sup(poly, (0.0, 2.0), 0.05)
    fine = np.abs(evaluate(poly, np.linspace(0, 2, 100 * cert.points))).max()
    assert cert.lower - 1e-12 <= fine <= cert.upper + 1e-12
    assert cert.gap <= 0.025 + 1e-15


def test_certified_sup_degenerate_cases():
    const = DirichletPoly([0.0], [2 - 1j])
    cert = certified_sup(const, (0, 5), 0.1)
    assert cert.lower == cert.upper == pytest.approx(abs(2 - 1j))
    point = certified_sup(DirichletPoly([1.0], [1.0]), (3, 3), 0.1)
    assert point.points == 1 and point.gap == 0


def test_certified_sup_budget():
    poly = DirichletPoly([100.0], [1.0])
    with pytest.raises(BudgetExceeded) as info:
        certified_sup(poly, (0, 10), 1e-6, budget=1000)
    assert info.value.result.points == 1000


def brute_admissible(terms, ps):
    best = 0.0
    for i in range(len(ps)):
        for j in range(i + 1, len(ps) + 1):
            if ps[j - 1] <= 2 * ps[i]:
                best = max(best, abs(terms[i:j].sum()))
    return best


def test_max_admissible_subsum_brute():
    rng = np.random.default_rng(3)
    ps = np.array([11, 13, 17, 19, 23, 29, 31, 37, 41, 43])
    terms = np.exp(1j * rng.uniform(0, 6.3, (6, len(ps))))
    vals, starts, stops = max_admissible_subsum(terms, ps)
    for r in range(6):
        assert vals[r] == pytest.approx(brute_admissible(terms[r], ps))
        assert ps[stops[r] - 1] <= 2 * ps[starts[r]]


def test_family_sup_against_brute(small_table):
    U, delta, L = 30.0, 0.4, (0.0, 0.5)
    res = family_sup(small_table, 12345.0, U, delta, L, eps=0.2, keep_grid=True)
    ps = small_table.primes[(small_table.primes >= U) & (small_table.primes <= U ** 1.4)]
    assert res.primes_used == len(ps)
    fine = np.linspace(*L, 4 * res.points)
    brute = max(brute_admissible(np.exp(-1j * (12345.0 + t) * np.log(ps.astype(float))), ps)
                for t in fine)
    assert res.lower - 1e-9 <= brute <= res.upper + 1e-9


def test_family_sup_empty_range(small_table):
    res = family_sup(small_table, 0.0, 24.0, 0.05, (0, 1))
    assert res.primes_used == 0 and res.upper == 0.0
