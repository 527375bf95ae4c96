"""Report figures. Figures are built without pyplot so no backend is selected
globally; each function writes one PNG and returns its path."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

_STYLE = {"figsize": (5.0, 3.4), "dpi": 120}


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    return path


def plot_bench(rows: list[dict], path, title: str = "") -> Path:
    """Seconds per operation against n, one log-log line per (suite, op)."""
    fig = Figure(**_STYLE)
    ax = fig.add_subplot()
    series = defaultdict(list)
    for r in rows:
        series[(r["suite"], r["op"])].append((r["n"], r["seconds"]))
    for (suite, op), pts in sorted(series.items()):
        pts.sort()
        ns, secs = zip(*pts)
        ax.loglog(ns, secs, "o-", label=f"{suite}:{op}", ms=4)
    ax.set_xlabel("n")
    ax.set_ylabel("seconds")
    if title:
        ax.set_title(title)
    if series:
        ax.legend(fontsize=7)
    ax.grid(True, which="both", lw=0.3)
    return _save(fig, path)


def plot_reduction(rs, log_ratios, path) -> Path:
    """|ln R| against the replication count r."""
    fig = Figure(**_STYLE)
    ax = fig.add_subplot()
    ax.loglog(rs, np.abs(log_ratios), "s-", ms=4)
    ax.set_xlabel("r (gadget copies)")
    ax.set_ylabel("|ln R|")
    ax.grid(True, which="both", lw=0.3)
    return _save(fig, path)


def plot_size_histogram(sizes, exact_probs, path, title: str = "") -> Path:
    """Empirical size frequencies beside the exact size distribution."""
    sizes = np.asarray(sizes)
    exact_probs = np.asarray(exact_probs, dtype=float)
    ks = np.arange(len(exact_probs))
    emp = np.bincount(sizes, minlength=len(ks))[: len(ks)] / max(len(sizes), 1)
    fig = Figure(**_STYLE)
    ax = fig.add_subplot()
    ax.bar(ks - 0.2, emp, width=0.4, label="sampled")
    ax.bar(ks + 0.2, exact_probs, width=0.4, label="exact")
    ax.set_xlabel("|I|")
    ax.set_ylabel("probability")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=7)
    return _save(fig, path)
