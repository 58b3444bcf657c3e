"""Dirichlet polynomials sum_n c_n exp(i t phi_n), increments and certified suprema."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, InvalidArgument
from .primes import PrimeTable, primes_in

# 2*pi as an unevaluated sum of three doubles
_TWO_PI = (6.283185307179586, 2.4492935982947064e-16, -5.989539619436679e-33)
_SPLITTER = 134217729.0  # 2**27 + 1
_CHUNK = 1 << 20  # complex entries per evaluation block

DEFAULT_POINT_BUDGET = 5_000_000


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def reduced_phase(t, phi):
    """t * phi reduced into [-pi, pi], accurate to ~1e-15 absolute.

    The product is formed exactly as a double-double and reduced against a
    three-part 2*pi, so |t * phi| up to ~1e15 keeps full absolute accuracy.
    """
    t = np.asarray(t, dtype=float)
    phi = np.asarray(phi, dtype=float)
    hi, lo = _two_prod(t, phi)
    k = np.rint(hi / _TWO_PI[0])
    p1, e1 = _two_prod(k, _TWO_PI[0])
    p2, e2 = _two_prod(k, _TWO_PI[1])
    r = ((((hi - p1) - e1) - p2) - e2) - k * _TWO_PI[2] + lo
    # k can be one off once hi / 2pi loses its fractional bits; wrap once more
    w = np.where(r > math.pi, -1.0, np.where(r < -math.pi, 1.0, 0.0))
    return (r + w * _TWO_PI[0]) + w * _TWO_PI[1]


@dataclass(frozen=True)
class DirichletPoly:
    """P(t) = sum_n coeffs[n] * exp(i t phases[n])."""

    phases: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        phases = np.atleast_1d(np.asarray(self.phases, dtype=float))
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if phases.ndim != 1 or phases.shape != coeffs.shape:
            raise InvalidArgument("phases and coeffs must be 1-d and of equal length")
        if len(np.unique(phases)) != len(phases):
            raise InvalidArgument("phases must be pairwise distinct")
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "coeffs", coeffs)

    def __len__(self):
        return len(self.phases)

    @property
    def phi_max(self) -> float:
        return float(np.max(np.abs(self.phases))) if len(self.phases) else 0.0

    @property
    def l2(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def __call__(self, t):
        return evaluate(self, t)

    @classmethod
    def over_primes(cls, primes, coeffs=None, sign=1.0):
        """Polynomial with phases sign*log p; ``sign=-1`` gives sum c_p p^{-it}."""
        primes = np.asarray(primes, dtype=float)
        if coeffs is None:
            coeffs = np.ones(len(primes), dtype=complex)
        return cls(sign * np.log(primes), coeffs)


def _phase_rows(poly: DirichletPoly, t: np.ndarray, theta=None) -> np.ndarray:
    ph = reduced_phase(t[:, None], poly.phases[None, :])
    if theta is not None:
        ph = ph + reduced_phase(theta, poly.phases)[None, :]
    return ph


def _evaluate(poly, t, theta=None):
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    out = np.empty(flat.shape, dtype=complex)
    if len(poly) == 0:
        out[:] = 0
        return out.reshape(t.shape) if t.ndim else complex(out[0])
    rows = max(1, _CHUNK // len(poly))
    for i in range(0, len(flat), rows):
        ph = _phase_rows(poly, flat[i : i + rows], theta)
        out[i : i + rows] = np.exp(1j * ph) @ poly.coeffs
    if t.ndim == 0:
        return complex(out[0])
    return out.reshape(t.shape)


def evaluate(poly: DirichletPoly, t):
    """sum_n c_n exp(i t phi_n), vectorised over ``t``."""
    return _evaluate(poly, t)


def evaluate_shifted(poly: DirichletPoly, theta: float, t):
    """P(theta + t) with the shift reduced separately, so large theta keeps accuracy."""
    return _evaluate(poly, t, theta=float(theta))


def prime_sum(table: PrimeTable, N1, N2, tau) -> complex:
    """sum over N1 <= p <= N2 of p^{-i tau}."""
    ps = primes_in(table, N1, N2)
    if len(ps) == 0:
        return 0j
    ph = reduced_phase(float(tau), np.log(ps.astype(float)))
    return complex(np.sum(np.exp(-1j * ph)))


def metric_d(poly: DirichletPoly, s, t) -> float:
    """Increment metric (2 sum |c_n|^2 sin^2((t-s) phi_n / 2))^{1/2}."""
    half = reduced_phase(float(t) - float(s), poly.phases) / 2
    return float(np.sqrt(2 * np.sum(np.abs(poly.coeffs) ** 2 * np.sin(half) ** 2)))


def derivative_bound(poly: DirichletPoly) -> float:
    """Lipschitz constant sum |c_n| |phi_n| of t -> P(t)."""
    return float(np.sum(np.abs(poly.coeffs) * np.abs(poly.phases)))


@dataclass
class SupCertificate:
    interval: tuple
    grid_step: float
    lower: float
    upper: float
    lipschitz: float
    argmax: float
    points: int = 0

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    def to_record(self) -> dict:
        return {
            "a": self.interval[0],
            "b": self.interval[1],
            "grid_step": self.grid_step,
            "lower": self.lower,
            "upper": self.upper,
            "lipschitz": self.lipschitz,
            "argmax_t": self.argmax,
        }


def _grid(a: float, b: float, step: float, budget: int):
    """Uniform grid over [a, b] with spacing <= step; (grid, spacing, truncated)."""
    if b == a or step == math.inf:
        return np.array([a]), 0.0, False
    n = int(math.ceil((b - a) / step)) + 1
    truncated = n > budget
    n = min(n, budget)
    n = max(n, 2)
    grid = np.linspace(a, b, n)
    return grid, (b - a) / (n - 1), truncated


def _check_interval(L):
    a, b = float(L[0]), float(L[1])
    if not b >= a:
        raise InvalidArgument(f"empty interval {L!r}")
    return a, b


def certified_sup(poly: DirichletPoly, L, eps: float, budget: int = DEFAULT_POINT_BUDGET,
                  theta: float | None = None) -> SupCertificate:
    """Two-sided enclosure of sup_{t in L} |P(theta + t)|.

    The grid spacing is eps / lipschitz, so every t lies within half a step of a
    grid point and upper - lower = step * lipschitz / 2 <= eps / 2.
    """
    if not eps > 0:
        raise InvalidArgument("eps must be positive")
    a, b = _check_interval(L)
    lip = derivative_bound(poly)
    step = eps / lip if lip > 0 else math.inf
    grid, spacing, truncated = _grid(a, b, step, budget)
    vals = np.abs(_evaluate(poly, grid, theta))
    k = int(np.argmax(vals))
    lower = float(vals[k])
    cert = SupCertificate((a, b), spacing, lower, lower + spacing * lip / 2, lip,
                          float(grid[k]), len(grid))
    if truncated:
        raise BudgetExceeded(
            f"certified_sup needs more than {budget} points; best gap {cert.gap:.3g}",
            result=cert)
    return cert


@dataclass
class FamilySup:
    """Supremum of |sum_{N1<=p<=N2} p^{-i(theta+t)}| over admissible (N1, N2) and t in L."""

    theta: float
    interval: tuple
    primes_used: int
    grid_step: float
    lipschitz: float
    lower: float
    upper: float
    argmax_t: float | None
    argmax_range: tuple | None = None
    points: int = 0
    grid_values: np.ndarray | None = field(default=None, repr=False)

    def to_record(self) -> dict:
        return {
            "theta": self.theta,
            "a": self.interval[0],
            "b": self.interval[1],
            "primes": self.primes_used,
            "grid_step": self.grid_step,
            "lipschitz": self.lipschitz,
            "lower": self.lower,
            "upper": self.upper,
            "argmax_t": self.argmax_t,
            "argmax_N1": None if self.argmax_range is None else self.argmax_range[0],
            "argmax_N2": None if self.argmax_range is None else self.argmax_range[1],
        }


def dyadic_pair_limits(ps: np.ndarray) -> np.ndarray:
    """For each start index i, one past the last j with ps[j] <= 2 * ps[i]."""
    return np.searchsorted(ps, 2 * ps, side="right")


def max_admissible_subsum(terms: np.ndarray, ps: np.ndarray):
    """max |sum_{i<=k<j} terms[:, k]| over ranges with ps[j-1] <= 2 ps[i].

    ``terms`` has shape (n_t, K). Returns (values, start index, stop index)
    per row. Quadratic in K; fine while K stays in the low thousands.
    """
    n_t, K = terms.shape
    best = np.zeros(n_t)
    best_i = np.zeros(n_t, dtype=np.int64)
    best_j = np.zeros(n_t, dtype=np.int64)
    if K == 0:
        return best, best_i, best_j
    S = np.zeros((n_t, K + 1), dtype=complex)
    np.cumsum(terms, axis=1, out=S[:, 1:])
    stops = dyadic_pair_limits(ps)
    rows = np.arange(n_t)
    for i in range(K):
        seg = np.abs(S[:, i + 1 : stops[i] + 1] - S[:, i : i + 1])
        k = np.argmax(seg, axis=1)
        v = seg[rows, k]
        better = v > best
        best = np.where(better, v, best)
        best_i = np.where(better, i, best_i)
        best_j = np.where(better, i + 1 + k, best_j)
    return best, best_i, best_j


def family_sup(table: PrimeTable, theta: float, U: float, delta: float, L, eps: float = 0.5,
               budget: int = DEFAULT_POINT_BUDGET, keep_grid: bool = False) -> FamilySup:
    """Certified sup over the family of prime sums with U <= p <= U^{1+delta}.

    A range [p_i, p_j] is admissible when p_j <= 2 p_i, i.e. when some N with
    N <= p_i < p_j <= 2N exists. The Lipschitz constant in t is
    K * log(U^{1+delta}) for K primes in range.
    """
    a, b = _check_interval(L)
    hi = U ** (1 + delta)
    ps = primes_in(table, U, hi)
    K = len(ps)
    if K == 0:
        return FamilySup(float(theta), (a, b), 0, 0.0, 0.0, 0.0, 0.0, None, None, 0,
                         np.zeros(1) if keep_grid else None)
    lip = K * math.log(hi)
    grid, spacing, truncated = _grid(a, b, eps / lip, budget)
    logs = np.log(ps.astype(float))
    base = reduced_phase(float(theta), logs)
    rows = max(1, _CHUNK // (K + 1))
    vals = np.empty(len(grid))
    starts = np.empty(len(grid), dtype=np.int64)
    stops = np.empty(len(grid), dtype=np.int64)
    for r in range(0, len(grid), rows):
        t = grid[r : r + rows]
        terms = np.exp(-1j * (reduced_phase(t[:, None], logs[None, :]) + base[None, :]))
        vals[r : r + rows], starts[r : r + rows], stops[r : r + rows] = max_admissible_subsum(terms, ps)
    k = int(np.argmax(vals))
    res = FamilySup(float(theta), (a, b), K, spacing, lip, float(vals[k]),
                    float(vals[k] + spacing * lip / 2), float(grid[k]),
                    (int(ps[starts[k]]), int(ps[stops[k] - 1])), len(grid),
                    vals if keep_grid else None)
    if truncated:
        raise BudgetExceeded(f"family_sup needs more than {budget} grid points", result=res)
    return res
