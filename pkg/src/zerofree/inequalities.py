"""Numerical checks of Hilbert's inequality, the 2q-th moment bounds and the chaining bound."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .dirichlet import DirichletPoly, certified_sup, metric_d, reduced_phase
from .errors import InvalidArgument
from .primes import PrimeTable, primes_in
from .spacing import DEFAULT_BUDGET, xi_for

GL_ORDER = 8
ROUNDOFF_FLOOR = 1e-13
HILBERT_SLACK = 1e-9

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)


# --- Hilbert's inequality -------------------------------------------------

@dataclass
class HilbertResult:
    value: complex
    bound: float
    delta: float
    passed: bool


def hilbert_form(lambdas, x, y) -> HilbertResult:
    """sum_{m != n} x_m y_n / (lambda_m - lambda_n) against (pi/delta) |x| |y|."""
    lam = np.asarray(lambdas, dtype=float)
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if not (lam.shape == x.shape == y.shape) or lam.ndim != 1:
        raise InvalidArgument("lambdas, x, y must be 1-d of equal length")
    gaps = np.diff(np.sort(lam))
    if len(gaps) and gaps.min() <= 0:
        raise InvalidArgument("lambdas must be pairwise distinct")
    delta = float(gaps.min()) if len(gaps) else math.inf
    diff = lam[:, None] - lam[None, :]
    np.fill_diagonal(diff, np.inf)
    value = complex(x @ (1.0 / diff) @ y)
    bound = math.pi / delta * float(np.linalg.norm(x) * np.linalg.norm(y))
    passed = abs(value) <= bound * (1 + HILBERT_SLACK)
    return HilbertResult(value, bound, delta, bool(passed))


def random_hilbert_instance(rng: np.random.Generator, max_n: int = 50, min_gap: float = 1e-3):
    """Random lambdas with all gaps >= min_gap, plus complex x, y."""
    n = int(rng.integers(2, max_n + 1))
    gaps = min_gap + rng.exponential(rng.choice([0.01, 0.1, 1.0]), size=n - 1)
    lam = np.concatenate([[rng.normal(0, 10)], gaps]).cumsum()
    lam = rng.permutation(lam)
    x = rng.normal(size=n) + 1j * rng.normal(size=n)
    y = rng.normal(size=n) + 1j * rng.normal(size=n)
    return lam, x, y


def hilbert_suite(trials: int, seed: int, max_n: int = 50, min_gap: float = 1e-3) -> dict:
    rng = np.random.default_rng(seed)
    worst = 0.0
    passes = 0
    for _ in range(trials):
        res = hilbert_form(*random_hilbert_instance(rng, max_n, min_gap))
        passes += res.passed
        worst = max(worst, abs(res.value) / res.bound)
    return {"trials": trials, "passes": passes,
            "pass_fraction": passes / trials if trials else 1.0, "worst_ratio": worst}


# --- quadrature -----------------------------------------------------------

def min_panels(length: float, q: int, phi_max: float) -> int:
    """Panels needed so each is at most pi / (4 q phi_max) wide."""
    if phi_max == 0:
        return 1
    return max(1, math.ceil(length * 4 * q * phi_max / math.pi))


def gl_mean(f, a: float, b: float, panels: int) -> tuple[float, float]:
    """Composite Gauss-Legendre mean value of f over [a, b]; also returns mean |f|."""
    edges = np.linspace(a, b, panels + 1)
    half = (edges[1:] - edges[:-1]) / 2
    mid = (edges[1:] + edges[:-1]) / 2
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    vals = f(nodes)
    total = float(np.sum(w * vals))
    scale = float(np.sum(w * np.abs(vals)))
    return total / (b - a), scale / (b - a)


def gl_mean_with_error(f, a: float, b: float, panels: int) -> tuple[float, float]:
    """Mean value plus an error estimate from the same rule at half the panels.

    A small roundoff floor is added so the estimate is never exactly zero.
    """
    fine, scale = gl_mean(f, a, b, panels)
    coarse, _ = gl_mean(f, a, b, max(1, math.ceil(panels / 2)))
    return fine, abs(fine - coarse) + ROUNDOFF_FLOOR * max(scale, 1e-300)


_PANEL_BLOCK = 1 << 15


def _power_mean(phases, coeffs, q: int, a: float, b: float, panels: int) -> tuple[float, float]:
    """Gauss-Legendre mean of |sum c_n e^{i theta phi_n}|^{2q} over [a, b]; also mean |f|.

    Node k, j sits at mid_k + h x_j, so e^{i theta phi} = e^{i mid_k phi} e^{i h x_j phi}:
    only the midpoints need the exact phase reduction and the rest is a matrix product.
    """
    h = (b - a) / (2 * panels)
    local = np.exp(1j * np.outer(h * _GL_NODES, phases))  # (order, N)
    total = 0.0
    scale = 0.0
    for start in range(0, panels, _PANEL_BLOCK):
        k = np.arange(start, min(panels, start + _PANEL_BLOCK))
        mid = a + (2 * k + 1) * h
        rows = np.exp(1j * reduced_phase(mid[:, None], phases[None, :])) * coeffs[None, :]
        vals = np.abs(rows @ local.T) ** (2 * q)  # (panels, order)
        total += float(np.sum(vals @ _GL_WEIGHTS))
        scale += float(np.sum(np.abs(vals) @ _GL_WEIGHTS))
    return total * h / (b - a), scale * h / (b - a)


def _power_mean_with_error(phases, coeffs, q, a, b, panels):
    fine, scale = _power_mean(phases, coeffs, q, a, b, panels)
    coarse, _ = _power_mean(phases, coeffs, q, a, b, max(1, math.ceil(panels / 2)))
    return fine, abs(fine - coarse) + ROUNDOFF_FLOOR * max(scale, 1e-300)


def _shifted_coeffs(poly: DirichletPoly, t: float) -> np.ndarray:
    """Coefficients of theta -> P(theta + t)."""
    return poly.coeffs * np.exp(1j * reduced_phase(float(t), poly.phases))


# --- moment bounds --------------------------------------------------------

@dataclass
class MomentEstimate:
    """Quadrature estimate of a normalized 2q-th moment against its bound.

    ``bound`` is the right-hand side in the form the source states it.
    ``corrected_bound`` uses the scale the proof actually controls; for the
    increment moment that is sum |c_n|^2 |e^{it phi_n} - e^{is phi_n}|^2 = 2 d(s,t)^2,
    so it exceeds ``bound`` by 2^q. Elsewhere the two coincide.
    """

    value: float
    quad_error: float
    bound: float
    margin: float
    corrected_bound: float
    corrected_margin: float
    xi: float
    xi_kind: str
    panels: int
    inputs: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.margin >= -self.quad_error

    @property
    def corrected_passed(self) -> bool:
        return self.corrected_margin >= -self.quad_error

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["passed"] = self.passed
        rec["corrected_passed"] = self.corrected_passed
        return rec


def _moment_factor(N: int, q: int, length: float, xi: float) -> float:
    return math.factorial(q) + 2 * min(N**q, math.pi * math.factorial(q)) / (length * xi)


def _resolve_panels(length, q, phi_max, resolution):
    need = min_panels(length, q, phi_max)
    if resolution is None:
        return 2 * need
    if resolution < need:
        raise InvalidArgument(
            f"resolution {resolution} below oscillation-safe minimum {need} panels")
    return int(resolution)


def _interval(J):
    a, b = float(J[0]), float(J[1])
    if not b > a:
        raise InvalidArgument(f"interval {J!r} must have positive length")
    return a, b


def moment_increment(poly: DirichletPoly, J, q: int, s: float, t: float,
                     resolution: int | None = None, budget: int = DEFAULT_BUDGET) -> MomentEstimate:
    """(1/|J|) int_J |P(theta+t) - P(theta+s)|^{2q} dtheta versus its bound.

    ``resolution`` is the number of Gauss-Legendre panels over J.
    """
    a, b = _interval(J)
    length = b - a
    panels = _resolve_panels(length, q, poly.phi_max, resolution)
    xi, kind = xi_for(poly.phases, q, budget)

    diff = _shifted_coeffs(poly, t) - _shifted_coeffs(poly, s)
    value, err = _power_mean_with_error(poly.phases, diff, q, a, b, panels)
    factor = _moment_factor(len(poly), q, length, xi)
    d = metric_d(poly, s, t)
    bound = factor * d ** (2 * q)
    corrected = factor * (2 * d * d) ** q
    return MomentEstimate(value, err, bound, bound - value, corrected, corrected - value,
                          xi, kind, panels,
                          {"J": [a, b], "q": q, "s": s, "t": t, "N": len(poly)})


def moment_plain(poly: DirichletPoly, J, q: int, resolution: int | None = None,
                 budget: int = DEFAULT_BUDGET, t: float = 0.0) -> MomentEstimate:
    a, b = _interval(J)
    length = b - a
    panels = _resolve_panels(length, q, poly.phi_max, resolution)
    xi, kind = xi_for(poly.phases, q, budget)

    value, err = _power_mean_with_error(poly.phases, _shifted_coeffs(poly, t), q, a, b, panels)
    bound = _moment_factor(len(poly), q, length, xi) * poly.l2 ** (2 * q)
    return MomentEstimate(value, err, bound, bound - value, bound, bound - value, xi, kind,
                          panels, {"J": [a, b], "q": q, "t": t, "N": len(poly)})


def mean_value_bound(coeffs, Nmax: float, T: float, q: int) -> float:
    """q! (1 + 2 pi Nmax^q / T) (sum |c_p|^2)^q."""
    l2sq = float(np.sum(np.abs(np.asarray(coeffs)) ** 2))
    return math.factorial(q) * (1 + 2 * math.pi * Nmax**q / T) * l2sq**q


def mean_value_check(table: PrimeTable, coeffs, Nmax: float, T: float, q: int,
                resolution: int | None = None) -> MomentEstimate:
    """(1/2T) int_{-T}^{T} |sum_{p <= Nmax} c_p p^{-i theta}|^{2q} against q!(1 + 2 pi N^q / T)(sum |c_p|^2)^q."""
    if not T > 0:
        raise InvalidArgument("T must be positive")
    ps = primes_in(table, 2, Nmax)
    coeffs = np.asarray(coeffs, dtype=complex)
    if len(coeffs) != len(ps):
        raise InvalidArgument(f"expected {len(ps)} coefficients, one per prime <= {Nmax}")
    poly = DirichletPoly.over_primes(ps, coeffs, sign=-1.0)
    panels = _resolve_panels(2 * T, q, poly.phi_max, resolution)

    value, err = _power_mean_with_error(poly.phases, poly.coeffs, q, -T, T, panels)
    bound = mean_value_bound(coeffs, Nmax, T, q)
    return MomentEstimate(value, err, bound, bound - value, bound, bound - value,
                          math.nan, "not-used", panels,
                          {"Nmax": Nmax, "T": T, "q": q, "N": len(ps)})


# --- chaining bound -------------------------------------------------------

def chain_factor(J, q: int, xi: float) -> float:
    """[q! (1 + 2 pi / (|J| xi))]^{1/2q}."""
    length = float(J[1]) - float(J[0])
    return (math.factorial(q) * (1 + 2 * math.pi / (length * xi))) ** (1 / (2 * q))


def chaining_bound(poly: DirichletPoly, J, L, q: int, Cq: float, budget: int = DEFAULT_BUDGET) -> float:
    """Chaining bound for the 2q-th norm of sup_{t in L} |P(theta + t)| over theta in J."""
    if not Cq > 0:
        raise InvalidArgument("Cq must be positive")
    xi, _ = xi_for(poly.phases, q, budget)
    Lw = float(L[1]) - float(L[0])
    phi = poly.phi_max
    spread = max(1.0, Lw * phi) ** (1 / (2 * q))
    reach = min(Lw, 1 / phi) if phi > 0 else Lw
    weighted = float(np.sqrt(np.sum(np.abs(poly.coeffs) ** 2 * poly.phases**2)))
    return Cq * chain_factor(J, q, xi) * spread * (poly.l2 + reach * weighted)


def sup_moment(poly: DirichletPoly, J, L, q: int, samples: int, rng: np.random.Generator,
               eps: float) -> float:
    """Monte-Carlo (mean over theta ~ U(J) of sup_L |P(theta+t)|^{2q})^{1/2q}, using certified upper ends."""
    thetas = rng.uniform(float(J[0]), float(J[1]), size=samples)
    sups = np.array([certified_sup(poly, L, eps, theta=th).upper for th in thetas])
    return float(np.mean(sups ** (2 * q)) ** (1 / (2 * q)))


def random_prime_poly(rng: np.random.Generator, table: PrimeTable, max_n: int = 8,
                      pool: int = 20) -> DirichletPoly:
    n = int(rng.integers(1, max_n + 1))
    ps = np.sort(rng.choice(table.primes[:pool], size=n, replace=False))
    coeffs = rng.normal(size=n) + 1j * rng.normal(size=n)
    return DirichletPoly.over_primes(ps, coeffs)


@dataclass
class ChainCase:
    lhs: float
    bound_unit: float
    J: tuple
    L: tuple
    N: int

    @property
    def ratio(self) -> float:
        return self.lhs / self.bound_unit


def chain_suite(table: PrimeTable, q: int, seed: int, n_polys: int = 50, samples: int = 32,
                eps_rel: float = 0.02) -> list[ChainCase]:
    """Seeded random prime-phase instances with Monte-Carlo left sides and unit-constant bounds."""
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(n_polys):
        poly = random_prime_poly(rng, table)
        J = (0.0, float(rng.choice([10.0, 100.0, 1000.0])))
        start = float(rng.uniform(0, 10))
        L = (start, start + float(rng.choice([0.1, 0.5, 1.0, 3.0])))
        eps = eps_rel * float(np.sum(np.abs(poly.coeffs)))
        lhs = sup_moment(poly, J, L, q, samples, rng, eps)
        cases.append(ChainCase(lhs, chaining_bound(poly, J, L, q, 1.0), J, L, len(poly)))
    return cases


@dataclass
class CqCalibration:
    q: int
    cq: float
    seed: int
    n_polys: int
    ratios: list

    def to_record(self) -> dict:
        return {"q": self.q, "cq": self.cq, "seed": self.seed, "n_polys": self.n_polys,
                "max_ratio": max(self.ratios), "median_ratio": float(np.median(self.ratios))}


def calibrate_cq(table: PrimeTable, q: int, seed: int = 2024, n_polys: int = 50,
                 samples: int = 32) -> CqCalibration:
    """Smallest Cq that makes the chaining check hold on a fixed seeded suite."""
    cases = chain_suite(table, q, seed, n_polys, samples)
    ratios = [c.ratio for c in cases]
    return CqCalibration(q, max(ratios), seed, n_polys, ratios)
