"""Figures written next to CLI reports. Uses the Agg backend; nothing is shown on screen."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

DPI = 120


def _style(ax, xlabel, ylabel, title=None):
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title, fontsize=10)
    ax.grid(alpha=0.3)
    for side in ("top", "right"):
        ax.spines[side].set_visible(False)


def _save(fig, directory, name) -> str:
    path = Path(directory) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI, metadata={"Software": None})
    plt.close(fig)
    return str(path)


def plot_sup_profile(directory, t, values, lower, upper, name="sup_profile.png") -> str:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(t, values, lw=0.8, color="C0")
    ax.axhline(lower, color="C2", ls="--", lw=0.8, label=f"lower {lower:.4g}")
    ax.axhline(upper, color="C3", ls=":", lw=0.8, label=f"upper {upper:.4g}")
    ax.legend(frameon=False, fontsize=8)
    _style(ax, "t", "|P(t)|", "certified supremum")
    return _save(fig, directory, name)


def plot_theta_sups(directory, sups, threshold, name="theta_sups.png") -> str:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    sups = np.asarray(sups, dtype=float)
    bins = min(40, max(5, len(sups) // 5))
    if np.ptp(sups) > 0:
        ax.hist(sups, bins=bins, color="C0", alpha=0.8)
    else:
        ax.bar([sups[0] if len(sups) else 0.0], [len(sups)], width=0.05, color="C0")
    if np.isfinite(threshold):
        ax.axvline(threshold, color="C3", ls="--", label="mu(alpha) M")
        ax.legend(frameon=False, fontsize=8)
    _style(ax, "family supremum", "count", "family suprema over sampled shifts")
    return _save(fig, directory, name)


def plot_turan(directory, rows, name="turan_scan.png") -> str:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    tau = [r["tau"] for r in rows]
    ax.semilogy(tau, [max(r["lhs"], 1e-16) for r in rows], ".", ms=3, label="|sum p^{-i tau}|")
    ax.semilogy(tau, [r["rhs_moment"] for r in rows], lw=0.8, label="rhs, log power 1/2q - 1/2")
    ax.semilogy(tau, [r["rhs_log10"] for r in rows], lw=0.8, label="rhs, log power 10")
    ax.legend(frameon=False, fontsize=8)
    _style(ax, "tau", "magnitude", "prime sums against Turan-type bounds")
    return _save(fig, directory, name)


def plot_cover(directory, hits, name="cover.png") -> str:
    fig, ax = plt.subplots(figsize=(6, 1.8))
    hits = np.asarray(hits, dtype=float)
    ax.imshow(hits[None, :], aspect="auto", cmap="Greens", vmin=0, vmax=1,
              interpolation="nearest")
    ax.set_yticks([])
    _style(ax, "interval index i", "", f"{int(hits.sum())} of {len(hits)} K_i hit")
    return _save(fig, directory, name)


def plot_hardy_z(directory, t, z, name="hardy_z.png") -> str:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(t, z, lw=0.7)
    ax.axhline(0, color="k", lw=0.5)
    _style(ax, "t", "Z(t)", "Hardy Z function")
    return _save(fig, directory, name)


def plot_ratios(directory, ratios, cq, name="chain_ratios.png") -> str:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(sorted(ratios), ".", ms=4)
    ax.axhline(cq, color="C3", ls="--", label=f"Cq = {cq:.4g}")
    ax.legend(frameon=False, fontsize=8)
    _style(ax, "instance (sorted)", "lhs / unit-constant bound", "chaining constant calibration")
    return _save(fig, directory, name)
