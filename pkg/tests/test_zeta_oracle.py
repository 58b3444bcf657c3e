import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerofree.errors import (
    AccuracyUnreachable,
    InfeasibleScale,
    InvalidArgument,
    PoleError,
    ResolutionWarning,
)
from zerofree.zeta_oracle import (
    _bernoulli_even,
    box_zero_scan,
    count_zeros,
    hardy_Z,
    riemann_siegel_theta,
    rvm_main_term,
    zeta,
    zeta_em,
)

mpmath.mp.dps = 30


def test_bernoulli_numbers():
    want = [mpmath.bernoulli(2 * k) for k in range(1, 12)]
    got = _bernoulli_even(11)
    assert [float(g) for g in got] == pytest.approx([float(w) for w in want], rel=1e-15)


@pytest.mark.parametrize("s", [2, 0, -1, 0.5, 3 + 4j, 0.5 + 14.134725j, 0.9 + 100j,
                               1.2 + 777j, 0.5 + 5000j, -2.5 + 1j])
def test_zeta_against_mpmath(s):
    got = zeta(complex(s))
    want = complex(mpmath.zeta(s))
    assert abs(got.value - want) <= max(1e-9 * max(1, abs(want)), got.err + 1e-12)


def test_zeta_known_values():
    assert zeta(2).value.real == pytest.approx(math.pi**2 / 6, abs=1e-12)
    assert zeta(0).value.real == pytest.approx(-0.5, abs=1e-13)
    assert zeta(4).value.real == pytest.approx(math.pi**4 / 90, abs=1e-12)


def test_pole_and_tolerance():
    with pytest.raises(PoleError):
        zeta(1.0)
    with pytest.raises(AccuracyUnreachable) as info:
        zeta_em(0.5 + 1000j, 5, 2, tol=1e-10)
    assert info.value.achieved.err > 1e-10


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 2.0), st.floats(-300, 300))
def test_zeta_property_vs_mpmath(sigma, t):
    if abs(complex(sigma, t) - 1) < 1e-3:
        return
    got = zeta(complex(sigma, t))
    want = complex(mpmath.zeta(complex(sigma, t)))
    assert abs(got.value - want) <= 1e-9 * max(1.0, abs(want))


@pytest.mark.parametrize("t", [3.0, 14.5, 50.0, 123.4, 1000.0])
def test_theta_against_mpmath(t):
    assert riemann_siegel_theta(t) == pytest.approx(float(mpmath.siegeltheta(t)), abs=1e-10)


@pytest.mark.parametrize("t", [10.0, 25.0, 60.0, 200.0, 2000.0])
def test_hardy_Z_em_against_mpmath(t):
    assert hardy_Z(t, "euler-maclaurin") == pytest.approx(float(mpmath.siegelz(t)), abs=1e-8)


@pytest.mark.parametrize("t", [40.0, 200.0, 2000.0])
def test_hardy_Z_rs_accuracy(t):
    # main sum plus C0 leaves an O(t^{-3/4}) remainder
    assert abs(hardy_Z(t, "riemann-siegel") - float(mpmath.siegelz(t))) < 0.1 * t ** -0.75 + 1e-3


def test_abs_Z_equals_abs_zeta():
    for t in [7.0, 33.3, 101.0]:
        assert abs(hardy_Z(t, "euler-maclaurin")) == pytest.approx(abs(zeta(0.5 + 1j * t).value),
                                                                   abs=1e-8)


def test_hardy_Z_arguments():
    with pytest.raises(InvalidArgument):
        hardy_Z(1.0)
    with pytest.raises(InvalidArgument):
        hardy_Z(3.0, "riemann-siegel")
    with pytest.raises(InvalidArgument):
        hardy_Z(10.0, "nope")
    assert hardy_Z(np.array([[10.0, 20.0]])).shape == (1, 2)


def test_count_zeros_100():
    res = count_zeros(100.0, 0.01)
    assert res.count == int(mpmath.nzeros(100)) == 29
    assert abs(res.count - rvm_main_term(100.0)) <= 1 and not res.flagged


def test_count_zeros_guards():
    with pytest.raises(InfeasibleScale):
        count_zeros(1e5, 0.01)
    with pytest.warns(ResolutionWarning):
        count_zeros(60.0, 2.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        count_zeros(30.0, 0.05)


def test_rvm_main_term():
    x = 100 / (2 * math.pi)
    assert rvm_main_term(100.0) == pytest.approx(x * math.log(x) - x + 0.875)


def test_box_scan_zero_free_box():
    box = box_zero_scan(0.9, (10.0, 20.0), 40)
    assert box.min_abs > 0 and box.verdict == "consistent"
    assert box.critical_zeros == 1  # 14.1347 lies left of the box
    assert box.label == "heuristic"


def test_box_scan_through_a_zero():
    box = box_zero_scan(0.5, (13.5, 14.8), 80)
    assert box.verdict == "inconsistent"
    assert box.min_abs < box.floor


def test_box_scan_guards():
    with pytest.raises(InvalidArgument):
        box_zero_scan(1.3, (10, 20), 10)
    with pytest.raises(InfeasibleScale):
        box_zero_scan(0.9, (10, 2e4), 10)
    assert box_zero_scan(0.9, (20, 10), 10).verdict == "consistent"
