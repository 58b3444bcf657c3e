"""Parameter derivation, Turan-criterion scans, the good-theta set and the covering count."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dirichlet import family_sup, max_admissible_subsum, reduced_phase
from .errors import ConstraintViolation, InfeasibleScale, InvalidArgument
from .primes import PrimeTable, primes_in

DEFAULT_CAP = 10**8
SQRT2 = math.sqrt(2)


@dataclass
class Check:
    name: str
    tag: str
    passed: bool
    detail: str = ""
    exact: bool = False

    def to_record(self) -> dict:
        return {"name": self.name, "tag": self.tag, "passed": self.passed,
                "detail": self.detail, "exact": self.exact}


@dataclass
class ParameterSet:
    H: int
    delta: Fraction
    q: int
    B: Fraction
    nu: int
    b: Fraction
    delta0: Fraction  # exact value of the chosen float
    D: Fraction
    alpha: float
    alpha_star: float
    cq: float
    checks: list = field(default_factory=list)

    # dyadic scale; U^{2B} etc. are irrational for non-integer B*nu
    @property
    def U(self) -> int:
        return 2**self.nu

    @property
    def log2_J_start(self) -> Fraction:
        return 2 * self.B * self.nu

    @property
    def J(self) -> tuple[float, float]:
        lo = 2.0 ** float(self.log2_J_start)
        return lo, 2 * lo

    @property
    def L(self) -> tuple[float, float]:
        lo = 2.0 ** float(self.B * self.nu)
        return lo, 8 * lo

    @property
    def mu_alpha(self) -> float:
        return (1 - self.alpha) ** (-1 / (2 * self.q))

    @property
    def sigma0(self) -> float:
        return 1 - float(self.delta0) ** 12

    @property
    def c(self) -> float:
        return 2 * self.mu_alpha * self.cq

    @property
    def family_top(self) -> float:
        """U^{1+delta}, the largest prime the family sums reach."""
        return 2.0 ** (self.nu * float(1 + self.delta))

    @property
    def nu_delta(self) -> int:
        return nu_threshold(self.delta, self.delta0)

    def to_record(self) -> dict:
        J, L = self.J, self.L
        return {
            "H": self.H, "delta": str(self.delta), "q": self.q, "B": str(self.B),
            "nu": self.nu, "U": self.U, "J": list(J), "L": list(L), "b": str(self.b),
            "delta0": float(self.delta0), "D": float(self.D), "alpha": self.alpha,
            "mu_alpha": self.mu_alpha, "sigma0": self.sigma0, "cq": self.cq, "c": self.c,
            "alpha_bar": alpha_bar(self), "alpha_star": self.alpha_star,
            "nu_delta": self.nu_delta,
            "checks": [c.to_record() for c in self.checks],
        }


def nu_threshold(delta, delta0) -> int:
    """Smallest nu with 2^{nu [delta - 2 delta0/(1-delta0)]} >= 7^{1+delta}."""
    gap = float(Fraction(delta) - 2 * Fraction(delta0) / (1 - Fraction(delta0)))
    if gap <= 0:
        raise ConstraintViolation("delta - 2 delta0/(1 - delta0) must be positive",
                                  "2*delta0/(1-delta0) < delta")
    nu = max(1, math.ceil((1 + float(delta)) * math.log2(7) / gap))
    while nu > 1 and (nu - 1) * gap >= (1 + float(delta)) * math.log2(7):
        nu -= 1
    return nu


def _rational_checks(H, delta, q, B, b):
    one = Fraction(1)
    eighth = Fraction(1, 8)
    tag = "parameter-pipeline"
    return [
        Check("delta = (H-1)/(8H)", tag, delta == Fraction(H - 1, 8 * H), exact=True),
        Check("q = 5/(1-8 delta) = 5H", tag, Fraction(5) / (1 - 8 * delta) == q == 5 * H, exact=True),
        Check("0 < delta < 1/8", tag, 0 < delta < eighth, exact=True),
        Check("q > 4(delta+1)/(1-8 delta)", tag, q > 4 * (delta + 1) / (1 - 8 * delta), exact=True),
        Check("2B = 8q delta + 4(delta+1) < q", tag, 2 * B == 8 * q * delta + 4 * (delta + 1) and 2 * B < q,
              exact=True),
        Check("(1+delta)(1+1/q) - B/(2q) = 1 - delta", tag,
              (1 + delta) * (1 + Fraction(1, q)) - B / (2 * q) == one - delta, exact=True),
        Check("B < 5/(2(1-8 delta))", tag, B < Fraction(5) / (2 * (1 - 8 * delta)), exact=True),
        Check("b = delta/(2B) >= delta(1-8 delta)/5", tag,
              b == delta / (2 * B) and b >= delta * (1 - 8 * delta) / 5, exact=True),
        Check("delta(1-8 delta)/5 >= (delta/2)^6", tag,
              delta * (1 - 8 * delta) / 5 >= (delta / 2) ** 6, exact=True),
        Check("H < 9", tag, H < 9, exact=True),
    ]


def default_delta0(delta: Fraction, b: Fraction) -> float:
    """0.99 of sup{delta0 : 2 delta0/(1-delta0) < delta, delta0 <= b^{1/6}}."""
    return 0.99 * min(float(delta / (2 + delta)), float(b) ** (1 / 6))


def derive_params(H: int, nu: int, alpha: float, delta0: float | None = None,
                  alpha_star: float | None = None, cq: float = 1.0) -> ParameterSet:
    """Build and verify the full parameter vector for integer H in [2, 8].

    Rational fields (delta, q, B, b) are exact Fractions and every algebraic
    identity between them is checked with zero tolerance.
    """
    if isinstance(H, bool) or int(H) != H or not 2 <= H <= 8:
        raise InvalidArgument(f"H must be an integer in [2, 8], got {H!r}")
    if isinstance(nu, bool) or int(nu) != nu or nu < 1:
        raise InvalidArgument(f"nu must be a positive integer, got {nu!r}")
    if not 0 < alpha < 1:
        raise InvalidArgument(f"alpha must lie in (0, 1), got {alpha!r}")
    if alpha_star is None:
        alpha_star = alpha
    if not 0 < alpha_star < 1:
        raise InvalidArgument(f"alpha_star must lie in (0, 1), got {alpha_star!r}")
    if not cq > 0:
        raise InvalidArgument("cq must be positive")
    H, nu = int(H), int(nu)
    delta = Fraction(H - 1, 8 * H)
    q = 5 * H
    B = 4 * q * delta + 2 * (delta + 1)
    b = delta / (2 * B)
    checks = _rational_checks(H, delta, q, B, b)

    if delta0 is None:
        delta0 = default_delta0(delta, b)
    d0 = Fraction(float(delta0))
    if not (d0 > 0 and 2 * d0 / (1 - d0) < delta):
        raise ConstraintViolation(f"delta0={float(d0)} violates 0 < 2 delta0/(1-delta0) < delta",
                                  "0 < 2*delta0/(1-delta0) < delta")
    if not d0**6 <= b:
        raise ConstraintViolation(f"delta0={float(d0)} violates delta0 <= b^(1/6)",
                                  "delta0 <= b^(1/6)")
    checks += [
        Check("0 < 2 delta0/(1-delta0) < delta", "parameter-pipeline", True, exact=True),
        Check("delta0 <= b^(1/6)", "parameter-pipeline", True, exact=True),
    ]
    D = 1 / (2 * B * (1 - d0))
    checks.append(Check("D(1 - delta0) = 1/(2B)", "parameter-pipeline",
                        D * (1 - d0) == 1 / (2 * B), exact=True))
    params = ParameterSet(H, delta, q, B, nu, b, d0, D, float(alpha), float(alpha_star),
                          float(cq), checks)
    s0 = params.sigma0
    params.checks.append(Check("sigma0 = 1 - delta0^12 > 1 - 19^-12", "main-theorem-cover",
                               s0 > 1 - 19.0**-12 and d0**12 < Fraction(1, 19**12),
                               f"sigma0={s0!r}"))
    return params


def with_cq(params: ParameterSet, cq: float) -> ParameterSet:
    return derive_params(params.H, params.nu, params.alpha, float(params.delta0),
                         params.alpha_star, cq)


def M_bound(params: ParameterSet, Cq: float) -> float:
    """2 Cq 2^{(1-delta) nu} nu^{1/(2q) - 1/2}."""
    nu, q = params.nu, params.q
    return 2 * Cq * 2.0 ** (float(1 - params.delta) * nu) * nu ** (1 / (2 * q) - 0.5)


def alpha_bar(params: ParameterSet) -> float:
    """Good-measure fraction after mapping by psi: 1 - (1+2^{-B nu})/(1+3(sqrt2-1)2^{-B nu}) (1-alpha)."""
    e = 2.0 ** (-float(params.B * params.nu))
    return 1 - (1 + e) / (1 + 3 * (SQRT2 - 1) * e) * (1 - params.alpha)


def psi(theta):
    """theta + 3 sqrt(theta)."""
    th = np.asarray(theta, dtype=float)
    if np.any(th < 0) or np.any(np.isnan(th)):
        raise InvalidArgument("psi needs theta >= 0")
    out = th + 3 * np.sqrt(th)
    return float(out) if out.ndim == 0 else out


def turan_rhs(N: float, tau: float, beta: float, c: float, log_power: float = 10.0) -> float:
    """c N (log N)^{log_power} / tau^beta."""
    if not N > 1:
        raise InvalidArgument("N must exceed 1")
    if not tau > 0:
        raise InvalidArgument("tau must be positive")
    return c * N * math.log(N) ** log_power / tau**beta


# --- feasibility ------------------------------------------------------------

def feasibility(params: ParameterSet, table: PrimeTable | None, cap: float = DEFAULT_CAP) -> list[str]:
    """Reasons the desk-scale computations cannot run; empty when feasible."""
    reasons = []
    tau_max = params.J[1] + params.L[1]
    if tau_max > cap:
        reasons.append(f"tau reaches {tau_max:.4g} > cap {cap:.4g}")
    top = params.family_top
    if top > cap:
        reasons.append(f"primes needed up to {top:.4g} > cap {cap:.4g}")
    elif table is not None and top > table.limit:
        reasons.append(f"primes needed up to {top:.4g} > table limit {table.limit}")
    return reasons


# --- good-theta set -----------------------------------------------------------

@dataclass
class ThetaSetEstimate:
    samples: int
    threshold: float
    hit_fraction: float | None
    predicted_lower: float
    analysis_only: bool = False
    reasons: list = field(default_factory=list)
    thetas: np.ndarray | None = field(default=None, repr=False)
    sups: np.ndarray | None = field(default=None, repr=False)
    seed: int = 0

    @property
    def good_thetas(self) -> np.ndarray:
        if self.thetas is None:
            return np.empty(0)
        return self.thetas[self.sups <= self.threshold]

    @property
    def std_error(self) -> float:
        p = self.predicted_lower
        return math.sqrt(p * (1 - p) / self.samples) if self.samples else math.inf

    def to_record(self) -> dict:
        return {"samples": self.samples, "threshold": self.threshold,
                "hit_fraction": self.hit_fraction, "predicted_lower": self.predicted_lower,
                "std_error": self.std_error, "analysis_only": self.analysis_only,
                "reasons": self.reasons, "seed": self.seed}


def family_sups(table: PrimeTable, thetas, U: float, delta: float, L, eps: float = 0.5,
                workers: int = 1) -> np.ndarray:
    """Certified upper ends of the family supremum for each theta, in input order."""
    def one(th):
        return family_sup(table, th, U, delta, L, eps).upper

    thetas = np.asarray(thetas, dtype=float)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return np.array(list(pool.map(one, thetas)))
    return np.array([one(th) for th in thetas])


def theta_hit_fraction(table: PrimeTable, J, L, U: float, delta: float, threshold: float,
                       samples: int, seed: int, eps: float = 0.5, workers: int = 1):
    """Fraction of uniform theta in J whose family supremum stays below ``threshold``."""
    if samples < 1:
        raise InvalidArgument("samples must be positive")
    rng = np.random.default_rng(seed)
    thetas = rng.uniform(J[0], J[1], size=samples)
    sups = family_sups(table, thetas, U, delta, L, eps, workers)
    return float(np.mean(sups <= threshold)), thetas, sups


def estimate_theta_set(params: ParameterSet, table: PrimeTable, samples: int, seed: int,
                       eps: float = 0.5, cap: float = DEFAULT_CAP, threshold: float | None = None,
                       workers: int = 1) -> ThetaSetEstimate:
    """Monte-Carlo measure of {theta in J : family sup <= mu(alpha) M}.

    Chebyshev predicts a fraction of at least alpha. Beyond the feasibility cap
    the estimate is analysis-only: parameters are reported, nothing is sampled.
    """
    if samples < 1:
        raise InvalidArgument("samples must be positive")
    if threshold is None:
        threshold = params.mu_alpha * M_bound(params, params.cq)
    reasons = feasibility(params, table, cap)
    if reasons:
        return ThetaSetEstimate(samples, threshold, None, params.alpha, True, reasons, seed=seed)
    frac, thetas, sups = theta_hit_fraction(table, params.J, params.L, params.U,
                                            float(params.delta), threshold, samples, seed, eps,
                                            workers)
    return ThetaSetEstimate(samples, threshold, frac, params.alpha, False, [], thetas, sups, seed)


# --- Turan scan ---------------------------------------------------------------

@dataclass
class TuranReport:
    T: float
    N_range: tuple
    exponent_mode: str
    rows: list
    pass_fraction: float | None
    analysis_only: bool = False
    reasons: list = field(default_factory=list)

    @property
    def grid(self):
        return [(r["N1"], r["N2"], r["tau"]) for r in self.rows]

    def to_record(self) -> dict:
        return {"T": self.T, "N_range": list(self.N_range), "exponent_mode": self.exponent_mode,
                "pass_fraction": self.pass_fraction, "analysis_only": self.analysis_only,
                "reasons": self.reasons, "points": len(self.rows),
                "min_margin": min((r["margin"] for r in self.rows), default=None)}


EXPONENT_MODES = ("moment", "log10")


def turan_window(params: ParameterSet, theta: float):
    T = psi(theta)
    lo = T ** float(params.D * (1 - params.delta0))
    hi = T ** float(params.D * (1 + params.delta0))
    return T, lo, hi


def turan_scan(params: ParameterSet, table: PrimeTable, theta: float, tau_grid: int,
               exponent_mode: str = "moment", cap: float = DEFAULT_CAP) -> TuranReport:
    """Prime sums against the Turan-type bound over tau in [T - sqrt T, T + sqrt T], T = psi(theta).

    For each tau the admissible range [N1, N2] (N1 <= p <= N2 within the dyadic
    window) with the smallest margin is reported, using the smallest valid N.
    ``exponent_mode`` selects which right side drives ``rhs``/``margin``: "moment"
    uses (log N)^{1/(2q) - 1/2}, "log10" uses (log N)^{10}; both are always recorded.
    """
    if exponent_mode not in EXPONENT_MODES:
        raise InvalidArgument(f"exponent_mode must be one of {EXPONENT_MODES}")
    if tau_grid < 1:
        raise InvalidArgument("tau_grid must be positive")
    T, lo, hi = turan_window(params, theta)
    reasons = []
    if T + math.sqrt(T) > cap:
        reasons.append(f"tau reaches {T + math.sqrt(T):.4g} > cap {cap:.4g}")
    if hi > min(cap, table.limit):
        reasons.append(f"primes needed up to {hi:.4g} beyond table/cap")
    if reasons:
        return TuranReport(T, (lo, hi), exponent_mode, [], None, True, reasons)

    beta = float(params.delta0) ** 6
    c = params.c
    p_mom = 1 / (2 * params.q) - 0.5
    taus = np.linspace(T - math.sqrt(T), T + math.sqrt(T), tau_grid) if tau_grid > 1 else np.array([T])
    ps = primes_in(table, lo, hi)
    logs = np.log(ps.astype(float))
    # admissible ranges [p_i, p_j]: p_j <= min(2 p_i, hi); smallest N = max(lo, p_j / 2)
    stops = np.searchsorted(ps, np.minimum(2 * ps, hi), side="right")
    rows = []
    for tau in taus:
        best = None
        if len(ps):
            terms = np.exp(-1j * reduced_phase(tau, logs))
            S = np.concatenate([[0], np.cumsum(terms)])
            for i in range(len(ps)):
                j = np.arange(i + 1, stops[i] + 1)
                if len(j) == 0:
                    continue
                lhs = np.abs(S[j] - S[i])
                N = np.maximum(lo, ps[j - 1] / 2)
                logN = np.log(N)
                r_mom = c * N * logN**p_mom / tau**beta
                r_log = c * N * logN**10 / tau**beta
                rhs = r_mom if exponent_mode == "moment" else r_log
                k = int(np.argmin(rhs - lhs))
                if best is None or rhs[k] - lhs[k] < best["margin"]:
                    best = {"tau": float(tau), "N": float(N[k]), "N1": int(ps[i]),
                            "N2": int(ps[j[k] - 1]), "lhs": float(lhs[k]),
                            "rhs_moment": float(r_mom[k]), "rhs_log10": float(r_log[k]),
                            "rhs": float(rhs[k]), "margin": float(rhs[k] - lhs[k])}
        if best is None:
            N = max(lo, 1 + 1e-12)
            r_mom = turan_rhs(N, tau, beta, c, p_mom)
            r_log = turan_rhs(N, tau, beta, c, 10)
            rhs = r_mom if exponent_mode == "moment" else r_log
            best = {"tau": float(tau), "N": N, "N1": lo, "N2": hi, "lhs": 0.0,
                    "rhs_moment": r_mom, "rhs_log10": r_log, "rhs": rhs, "margin": rhs}
        rows.append(best)
    passed = sum(r["margin"] >= 0 for r in rows)
    return TuranReport(T, (lo, hi), exponent_mode, rows, passed / len(rows))


# --- structural checks ----------------------------------------------------------

def window_inside_shift(params: ParameterSet, thetas) -> np.ndarray:
    """Whether [T - sqrt T, T + sqrt T] lies in theta + L, T = psi(theta), per theta."""
    th = np.asarray(thetas, dtype=float)
    T = psi(th)
    Llo, Lhi = params.L
    return (T - np.sqrt(T) >= th + Llo) & (T + np.sqrt(T) <= th + Lhi)


def range_nesting(params: ParameterSet, nu: int | None = None, x: float = 1.0) -> dict:
    """Compare T^{D(1+delta0)} with (T/7)^{(1+delta)/(2B)} in log space at theta = x 2^{2B nu}.

    The nesting is only promised for nu >= nu_delta; both the outcome and the
    threshold are reported.
    """
    nu = params.nu if nu is None else nu
    log_theta = float(2 * params.B * nu) * math.log(2) + math.log(x)
    log_T = log_theta + math.log1p(3 * math.exp(-log_theta / 2))
    lhs = float(params.D * (1 + params.delta0)) * log_T
    rhs = float((1 + params.delta) / (2 * params.B)) * (log_T - math.log(7))
    nu_d = params.nu_delta
    return {"nu": nu, "nu_delta": nu_d, "log_upper": lhs, "log_bound": rhs,
            "nested": lhs <= rhs, "promised": nu >= nu_d,
            "lower_exponent_exact": params.D * (1 - params.delta0) == 1 / (2 * params.B)}


# --- covering ---------------------------------------------------------------------

@dataclass
class CoverResult:
    start: float
    width: float
    n_intervals: int
    hits: np.ndarray = field(repr=False)
    required_bar: float
    required_star: float

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.hits))

    @property
    def meets_bar(self) -> bool:
        return self.count >= self.required_bar

    @property
    def alpha_star_check(self) -> bool:
        return self.count >= self.required_star

    def intervals(self) -> np.ndarray:
        """K_i = [start + (i-1) w, start + i w) as rows (left, right), i = 1..n."""
        left = self.start + self.width * np.arange(self.n_intervals)
        return np.column_stack([left, left + self.width])

    def to_record(self) -> dict:
        return {"start": self.start, "width": self.width, "n_intervals": self.n_intervals,
                "count": self.count, "required_alpha_bar": self.required_bar,
                "required_alpha_star": self.required_star, "meets_alpha_bar": self.meets_bar,
                "alpha_star_check": self.alpha_star_check}


def n_cover_intervals(params: ParameterSet) -> int:
    return math.ceil(2.0 ** (float(params.B * params.nu) + 1) + 6 * (SQRT2 - 1))


def covering_subdivision(params: ParameterSet, good_thetas) -> CoverResult:
    """Count the K_i of width 2^{B nu - 1} tiling psi(J) that psi(good theta) lands in."""
    th = np.asarray(good_thetas, dtype=float).ravel()
    J0, J1 = params.J
    if np.any((th < J0) | (th > J1)):
        raise InvalidArgument("good thetas must lie in J")
    start = psi(J0)
    width = 2.0 ** (float(params.B * params.nu) - 1)
    n = n_cover_intervals(params)
    hits = np.zeros(n, dtype=bool)
    if len(th):
        idx = np.floor((psi(th) - start) / width).astype(np.int64)
        hits[np.clip(idx, 0, n - 1)] = True
    required_bar = alpha_bar(params) * (2.0 ** (float(params.B * params.nu) + 1) + 6 * (SQRT2 - 1))
    required_star = params.alpha_star * 2.0 ** (float(params.B * params.nu) + 1)
    return CoverResult(start, width, n, hits, required_bar, required_star)
