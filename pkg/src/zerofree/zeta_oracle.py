"""Desk-scale zeta evaluation and zero detection, independent of the prime-sum machinery.

Everything here is a heuristic sanity channel: sign-change zero counts and
grid minima, never a proof.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import loggamma

from .errors import AccuracyUnreachable, InfeasibleScale, InvalidArgument, PoleError, ResolutionWarning

DESK_CAP = 1e4
VERDICT_LABEL = "heuristic"


@lru_cache(maxsize=None)
def _bernoulli_even(m: int) -> tuple:
    """B_2, B_4, ..., B_2m as exact fractions (Akiyama-Tanigawa)."""
    n = 2 * m
    a = [Fraction(0)] * (n + 1)
    out = []
    for i in range(n + 1):
        a[i] = Fraction(1, i + 1)
        for j in range(i, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        if i >= 2 and i % 2 == 0:
            out.append(a[0])
    return tuple(out)


def _em_coefficients(m: int) -> np.ndarray:
    # B_{2k} / (2k)!
    return np.array([float(B / math.factorial(2 * k))
                     for k, B in enumerate(_bernoulli_even(m + 1), start=1)])


@dataclass
class ZetaSample:
    s: complex
    value: complex
    err: float

    def to_record(self) -> dict:
        return {"sigma": self.s.real, "t": self.s.imag, "re": self.value.real,
                "im": self.value.imag, "abs": abs(self.value), "err": self.err}


def zeta_em_array(s, terms: int, bernoulli_order: int):
    """Euler-Maclaurin zeta over an array of s; returns (values, error bounds).

    zeta(s) = sum_{n<N} n^{-s} + N^{1-s}/(s-1) + N^{-s}/2
              + sum_{k=1}^{m} B_{2k}/(2k)! s(s+1)...(s+2k-2) N^{1-s-2k} + R,
    with |R| bounded by the first omitted term times |s+2m+1|/(sigma+2m+1).
    """
    s = np.asarray(s, dtype=complex)
    if np.any(s == 1):
        raise PoleError("zeta has a pole at s = 1")
    if terms < 2 or bernoulli_order < 1:
        raise InvalidArgument("need terms >= 2 and bernoulli_order >= 1")
    N, m = int(terms), int(bernoulli_order)
    flat = s.ravel()
    n = np.arange(1, N, dtype=float)
    total = np.zeros(flat.shape, dtype=complex)
    logn = np.log(n)
    for r in range(0, len(flat), 256):
        block = flat[r : r + 256]
        total[r : r + 256] = np.exp(-np.outer(block, logn)).sum(axis=1)
    NmS = np.exp(-flat * math.log(N))
    total += N * NmS / (flat - 1) + NmS / 2
    coef = _em_coefficients(m)
    poch = flat.copy()  # s(s+1)...(s+2k-2)
    power = NmS / N  # N^{-s-1}
    term = None
    for k in range(1, m + 2):
        term = coef[k - 1] * poch * power
        if k == m + 1:
            break
        total += term
        poch = poch * (flat + 2 * k - 1) * (flat + 2 * k)
        power = power / (N * N)
    sig = flat.real
    denom = sig + 2 * m + 1
    factor = np.where(denom > 0, np.abs(flat + 2 * m + 1) / np.where(denom > 0, denom, 1), np.inf)
    err = np.abs(term) * factor
    return total.reshape(s.shape), err.reshape(s.shape)


def zeta_em(s: complex, terms: int, bernoulli_order: int, tol: float | None = None) -> ZetaSample:
    """Single-point Euler-Maclaurin evaluation with its remainder estimate."""
    value, err = zeta_em_array(np.array([s]), terms, bernoulli_order)
    sample = ZetaSample(complex(s), complex(value[0]), float(err[0]))
    if tol is not None and not sample.err <= tol:
        raise AccuracyUnreachable(
            f"error bound {sample.err:.3g} above tolerance {tol:.3g}; raise terms/order",
            achieved=sample)
    return sample


def auto_terms(t_max: float) -> tuple[int, int]:
    """Term count and Bernoulli order giving ~1e-13 accuracy for 0 < sigma <= 2, |t| <= t_max."""
    # 2 pi N well above |s| keeps successive correction terms shrinking geometrically
    N = int(abs(t_max) / 2) + 20
    return N, 14


def zeta(s, tol: float | None = None):
    """zeta(s) with automatic parameters; scalar in, ZetaSample out."""
    N, m = auto_terms(complex(s).imag)
    return zeta_em(complex(s), N, m, tol)


def riemann_siegel_theta(t):
    """theta(t) = Im log Gamma(1/4 + i t/2) - (t/2) log pi."""
    t = np.asarray(t, dtype=float)
    return np.imag(loggamma(0.25 + 0.5j * t)) - 0.5 * t * math.log(math.pi)


def _hardy_rs(t: np.ndarray) -> np.ndarray:
    # main sum plus the leading correction term C0
    a = np.sqrt(t / (2 * math.pi))
    N = np.floor(a).astype(np.int64)
    p = a - N
    th = riemann_siegel_theta(t)
    out = np.zeros_like(t)
    nmax = int(N.max()) if len(N) else 0
    for n in range(1, nmax + 1):
        active = N >= n
        out += np.where(active, np.cos(th - t * math.log(n)) / math.sqrt(n), 0.0)
    out *= 2
    c0 = np.cos(2 * math.pi * (p * p - p - 1 / 16)) / np.cos(2 * math.pi * p)
    sign = np.where(N % 2 == 1, 1.0, -1.0)
    return out + sign * (t / (2 * math.pi)) ** -0.25 * c0


def _hardy_em(t: np.ndarray) -> np.ndarray:
    N, m = auto_terms(float(t.max()) if len(t) else 0.0)
    values, _ = zeta_em_array(0.5 + 1j * t, N, m)
    return np.real(np.exp(1j * riemann_siegel_theta(t)) * values)


RS_MIN_T = 30.0


def hardy_Z(t, method: str = "auto"):
    """Hardy's Z(t) = e^{i theta(t)} zeta(1/2 + i t), real for real t.

    ``method``: "riemann-siegel" (main sum with leading correction),
    "euler-maclaurin" (rotated zeta_em), or "auto" which uses Euler-Maclaurin
    below t = 30, where the Riemann-Siegel remainder is still coarse.
    """
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 2):
        raise InvalidArgument("hardy_Z needs t >= 2")
    flat = arr.ravel()
    if method == "riemann-siegel":
        if np.any(flat < 2 * math.pi):
            raise InvalidArgument("Riemann-Siegel sum needs t >= 2 pi")
        out = _hardy_rs(flat)
    elif method == "euler-maclaurin":
        out = _hardy_em(flat)
    elif method == "auto":
        out = np.empty_like(flat)
        low = flat < RS_MIN_T
        if low.any():
            out[low] = _hardy_em(flat[low])
        if (~low).any():
            out[~low] = _hardy_rs(flat[~low])
    else:
        raise InvalidArgument(f"unknown method {method!r}")
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def rvm_main_term(T: float) -> float:
    """(T/2pi) log(T/2pi) - T/2pi + 7/8."""
    x = T / (2 * math.pi)
    return x * math.log(x) - x + 7 / 8


@dataclass
class ZeroCount:
    T: float
    grid_step: float
    count: int
    main_term: float
    flagged: bool
    label: str = VERDICT_LABEL

    def to_record(self) -> dict:
        return {"T": self.T, "grid_step": self.grid_step, "count": self.count,
                "main_term": self.main_term, "flagged": self.flagged, "label": self.label}


def _sign_changes(z: np.ndarray) -> int:
    s = np.sign(z)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def count_zeros(T: float, grid_step: float, method: str = "auto", cap: float = DESK_CAP) -> ZeroCount:
    """Sign changes of Z on (2, T]: a lower bound for the number of zeros up to T.

    Flagged when the count differs from the Riemann-von Mangoldt main term by
    more than 1. Warns (ResolutionWarning) when the step is coarse against the
    mean zero spacing 2 pi / log(T / 2 pi).
    """
    if T > cap:
        raise InfeasibleScale(f"T = {T} beyond desk cap {cap}")
    if not grid_step > 0:
        raise InvalidArgument("grid_step must be positive")
    if T <= 2:
        return ZeroCount(T, grid_step, 0, rvm_main_term(max(T, 2.0)), False)
    if T > 2 * math.pi * math.e:
        spacing = 2 * math.pi / math.log(T / (2 * math.pi))
        if grid_step > spacing / 4:
            warnings.warn(f"grid step {grid_step} coarse against mean zero spacing {spacing:.3g}",
                          ResolutionWarning, stacklevel=2)
    n = int(math.ceil((T - 2) / grid_step))
    grid = np.minimum(2 + grid_step * np.arange(n + 1), T)
    count = _sign_changes(hardy_Z(grid, method))
    main = rvm_main_term(T)
    return ZeroCount(T, grid_step, count, main, abs(count - main) > 1)


@dataclass
class BoxScan:
    sigma0: float
    t_interval: tuple
    grid: int
    min_abs: float
    argmin: complex | None
    floor: float
    critical_zeros: int
    verdict: str
    label: str = VERDICT_LABEL
    samples: list = field(default_factory=list, repr=False)

    def to_record(self) -> dict:
        return {"sigma0": self.sigma0, "t_interval": list(self.t_interval), "grid": self.grid,
                "min_abs": self.min_abs,
                "argmin": None if self.argmin is None else [self.argmin.real, self.argmin.imag],
                "floor": self.floor, "critical_zeros": self.critical_zeros,
                "verdict": self.verdict, "label": self.label}


SIGMA_TOP = 1.2


def box_zero_scan(sigma0: float, t_interval, grid: int, cap: float = DESK_CAP,
                  keep_samples: bool = False) -> BoxScan:
    """min |zeta| over a grid of [sigma0, 1.2] x t_interval.

    The verdict is "consistent" when the minimum exceeds a floor made of half
    the largest jump between neighbouring grid values plus the largest
    truncation error. Critical-line zeros inside the t-range are counted
    separately; they lie left of sigma0 and do not contradict anything.
    """
    t0, t1 = float(t_interval[0]), float(t_interval[1])
    if not 0 < sigma0 < SIGMA_TOP:
        raise InvalidArgument(f"sigma0 must lie in (0, {SIGMA_TOP})")
    if max(abs(t0), abs(t1)) > cap:
        raise InfeasibleScale(f"t beyond desk cap {cap}")
    if grid < 2:
        raise InvalidArgument("grid must be at least 2")
    if t1 <= t0:
        return BoxScan(sigma0, (t0, t1), grid, math.inf, None, 0.0, 0, "consistent")
    sig = np.linspace(sigma0, SIGMA_TOP, grid)
    ts = np.linspace(t0, t1, grid)
    S = sig[:, None] + 1j * ts[None, :]
    N, m = auto_terms(max(abs(t0), abs(t1)))
    values, err = zeta_em_array(S, N, m)
    mag = np.abs(values)
    k = np.unravel_index(int(np.argmin(mag)), mag.shape)
    jump = 0.0
    if grid > 1:
        jump = max(float(np.max(np.abs(np.diff(values, axis=0)))),
                   float(np.max(np.abs(np.diff(values, axis=1)))))
    floor = jump / 2 + float(err.max())
    min_abs = float(mag[k])
    lo_t = max(t0, 2.0)
    zeros = 0
    if t1 > lo_t:
        zgrid = np.linspace(lo_t, t1, max(grid, int((t1 - lo_t) / 0.01) + 1))
        zeros = _sign_changes(hardy_Z(zgrid))
    samples = []
    if keep_samples:
        samples = [ZetaSample(complex(S[i, j]), complex(values[i, j]), float(err[i, j]))
                   for i in range(grid) for j in range(grid)]
    verdict = "consistent" if min_abs > floor else "inconsistent"
    return BoxScan(float(sigma0), (t0, t1), grid, min_abs, complex(S[k]), floor, zeros,
                   verdict, samples=samples)
