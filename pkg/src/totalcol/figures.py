"""Verdict-matrix plots for suite reports."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402

CODES = {"holds": 0, "inconclusive": 1, "falsified": 2}
COLORS = ["#4c9a5b", "#c8c8c8", "#c0392b"]


def verdict_matrix(report: dict) -> tuple[list[str], list[str], np.ndarray]:
    claims = list(report["claims"])
    instances: list[str] = []
    for v in report["verdicts"]:
        label = v["instance"]["graph"]
        if label not in instances:
            instances.append(label)
    grid = np.full((len(claims), len(instances)), np.nan)
    for v in report["verdicts"]:
        grid[claims.index(v["claim"]), instances.index(v["instance"]["graph"])] = CODES[v["outcome"]]
    return claims, instances, grid


def render_figures(report: dict, out_dir: str) -> list[str]:
    """Write the verdict heatmap and per-claim outcome counts; returns file paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    claims, instances, grid = verdict_matrix(report)

    width = max(6.0, 0.12 * len(instances) + 2)
    fig, ax = plt.subplots(figsize=(width, 0.4 * len(claims) + 1.5))
    if instances:
        ax.imshow(np.ma.masked_invalid(grid), aspect="auto", interpolation="nearest",
                  cmap=ListedColormap(COLORS), vmin=0, vmax=2)
    ax.set_yticks(range(len(claims)), claims)
    ax.set_xlabel(f"instance ({len(instances)} graphs, corpus order)")
    if len(instances) <= 30:
        ax.set_xticks(range(len(instances)), instances, rotation=90, fontsize=7)
    else:
        ax.set_xticks([])
    handles = [plt.Rectangle((0, 0), 1, 1, color=c) for c in COLORS]
    ax.legend(handles, list(CODES), loc="upper left", bbox_to_anchor=(1.01, 1), fontsize=8)
    ax.set_title("verdicts per claim and instance")
    fig.tight_layout()
    path = os.path.join(out_dir, "verdict_matrix.png")
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(7, 0.35 * len(claims) + 1.5))
    left = np.zeros(len(claims))
    for outcome, color in zip(CODES, COLORS):
        counts = np.array([report["summary"][c][outcome] for c in claims], dtype=float)
        ax.barh(range(len(claims)), counts, left=left, color=color, label=outcome)
        left += counts
    ax.set_yticks(range(len(claims)), claims)
    ax.invert_yaxis()
    ax.set_xlabel("instances")
    ax.legend(fontsize=8)
    ax.set_title("outcome counts per claim")
    fig.tight_layout()
    path = os.path.join(out_dir, "outcome_counts.png")
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    paths.append(path)
    return paths
