"""Matplotlib figures written next to the CSV output of the CLI."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_convergence(best: Sequence[float], mean: Sequence[float], path, ylabel="burning cells"):
    """Best and mean fitness per generation (or per accepted step for hill climbing)."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    gens = range(len(best))
    ax.plot(gens, best, label="best", color="tab:red")
    if mean:
        ax.plot(gens, mean, label="mean", color="tab:gray", alpha=0.7)
    ax.set_xlabel("generation")
    ax.set_ylabel(ylabel)
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_sweep(rows: Sequence[dict], path):
    """Last barrier-building step against c; failed runs are marked on the axis."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ok = [r for r in rows if r["enclosed"]]
    bad = [r for r in rows if not r["enclosed"]]
    if ok:
        ax.plot([float(r["c"]) for r in ok], [r["enclose_time"] for r in ok], "o-",
                color="tab:blue", label="enclosed")
    if bad:
        ax.plot([float(r["c"]) for r in bad], [0] * len(bad), "x", color="tab:red",
                label="not enclosed")
    ax.set_xlabel("c")
    ax.set_ylabel("enclosure step")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_profile(profile: Sequence[int], path, title: str = ""):
    """Burning cells per distance to the highway at first contact (or at the horizon)."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(range(len(profile)), profile, color="tab:orange", width=1.0)
    ax.set_xlabel("distance to highway")
    ax.set_ylabel("burning cells")
    if title:
        ax.set_title(title)
    return _save(fig, path)


def plot_baselines(rows: Sequence[dict], path):
    """First highway contact against c for the scripted strategies; survivors sit on top."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for key, label, colour in (("symmetric_r", "symmetric", "tab:blue"),
                               ("diagonal_r", "diagonal", "tab:green")):
        pts = [(float(r["c"]), r[key]) for r in rows if isinstance(r[key], int)]
        if pts:
            ax.plot(*zip(*pts), "o-", color=colour, label=label)
        lost = [float(r["c"]) for r in rows if r[key] == "none"]
        if lost:
            top = max([p[1] for p in pts], default=1)
            ax.plot(lost, [top] * len(lost), "^", color=colour, label=f"{label} survives")
    ax.set_xlabel("c")
    ax.set_ylabel("first highway contact")
    ax.legend(frameon=False)
    return _save(fig, path)
