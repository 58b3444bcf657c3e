"""Report assembly and JSON / CSV / text emission."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from . import __version__

# descriptive tag per result the toolkit checks
TAGS = {
    "turan-criterion": "prime sums against the Turan-type localization bound",
    "main-theorem-cover": "zero-free covering count and the sigma0 threshold",
    "prime-spacing-bound": "xi(N, q) >= p_N^{-q} for prime phases",
    "moment-bound": "2q-th moment bounds for increments and values",
    "mean-value-corollary": "mean value of prime Dirichlet polynomials over [-T, T]",
    "hilbert-inequality": "Montgomery-Vaughan form of Hilbert's inequality",
    "hilbert-multiindex": "Hilbert's inequality over multi-index linear forms",
    "chaining-bound": "local supremum bound with an empirical constant",
    "parameter-pipeline": "exact parameter identities",
    "good-theta-set": "Chebyshev lower bound on the good shift set",
    "psi-map": "window map theta -> theta + 3 sqrt(theta)",
}

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INFEASIBLE = 2
EXIT_USAGE = 64


@dataclass
class ReportCheck:
    name: str
    tag: str
    passed: bool
    theorem_backed: bool = False
    analysis_only: bool = False
    detail: str = ""

    def to_record(self) -> dict:
        return {"name": self.name, "tag": self.tag, "passed": self.passed,
                "theorem_backed": self.theorem_backed, "analysis_only": self.analysis_only,
                "detail": self.detail}


@dataclass
class Report:
    subcommand: str
    config: dict
    checks: list = field(default_factory=list)
    results: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    figures: list = field(default_factory=list)

    def check(self, name, tag, passed, theorem_backed=False, analysis_only=False, detail=""):
        if tag not in TAGS:
            raise KeyError(f"unknown tag {tag!r}")
        self.checks.append(ReportCheck(name, tag, bool(passed), theorem_backed, analysis_only,
                                       detail))

    @property
    def tags(self) -> list:
        return sorted({c.tag for c in self.checks})

    @property
    def exit_status(self) -> int:
        if any(c.theorem_backed and not c.passed and not c.analysis_only for c in self.checks):
            return EXIT_VIOLATION
        if any(c.analysis_only for c in self.checks):
            return EXIT_INFEASIBLE
        return EXIT_OK

    def to_dict(self, timestamp: bool = True) -> dict:
        out = {
            "tool": "zerofree",
            "version": __version__,
            "subcommand": self.subcommand,
            "config": self.config,
            "tags": self.tags,
            "checks": [c.to_record() for c in self.checks],
            "results": self.results,
            "figures": self.figures,
            "exit_status": self.exit_status,
        }
        if timestamp:
            out["timestamp"] = datetime.now(timezone.utc).isoformat()
        return out


def _plain(obj):
    """JSON-safe conversion: numpy scalars/arrays, Fractions, complex, non-finite floats."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_plain(obj.real), _plain(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def to_json(report: Report, timestamp: bool = True) -> str:
    return json.dumps(_plain(report.to_dict(timestamp)), indent=2, sort_keys=True) + "\n"


def to_csv(report: Report) -> str:
    buf = io.StringIO()
    buf.write(f"# zerofree {__version__} {report.subcommand}\n")
    for key, value in sorted(report.config.items()):
        buf.write(f"# {key}={json.dumps(_plain(value))}\n")
    rows = [_plain(r) for r in report.rows]
    if rows:
        # rows may differ in keys; columns follow first appearance
        fields = list(dict.fromkeys(k for r in rows for k in r))
        writer = csv.DictWriter(buf, fieldnames=fields, restval="", lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: json.dumps(v) if isinstance(v, list) else v for k, v in r.items()})
    return buf.getvalue()


def to_text(report: Report) -> str:
    lines = [f"zerofree {__version__} :: {report.subcommand}"]
    lines += [f"  {k} = {_plain(v)}" for k, v in sorted(report.config.items())]
    lines.append("checks:")
    for c in report.checks:
        state = "SKIP" if c.analysis_only else ("PASS" if c.passed else "FAIL")
        kind = "theorem" if c.theorem_backed else "empirical"
        extra = f"  ({c.detail})" if c.detail else ""
        lines.append(f"  [{state}] {c.name} <{c.tag}, {kind}>{extra}")
    lines.append(f"exit status: {report.exit_status}")
    return "\n".join(lines) + "\n"


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return to_json(report)
    if fmt == "csv":
        return to_csv(report)
    if fmt == "text":
        return to_text(report)
    raise ValueError(f"unknown format {fmt!r}")
