"""Figures written next to the delimited report files (Agg backend, files only)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .graph import Graph  # noqa: E402
from .kernels import SupportTensor  # noqa: E402

STYLE = {
    "figure.dpi": 110,
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def acceptance_timing(rows: list[dict], path: Path) -> Path:
    """Horizontal bars of runtime per criterion against its budget (log scale)."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.5, 0.32 * len(rows) + 1.2))
        y = np.arange(len(rows))
        secs = [max(r["seconds"], 1e-3) for r in rows]
        colors = ["tab:green" if r["passed"] else "tab:red" for r in rows]
        ax.barh(y, [r["budget_seconds"] for r in rows], color="0.88", label="budget")
        ax.barh(y, secs, color=colors, label="runtime")
        ax.set_yticks(y, [f'{r["criterion"]}. {r["name"]}' for r in rows])
        ax.invert_yaxis()
        ax.set_xscale("log")
        ax.set_xlabel("seconds")
        ax.legend(loc="lower right", frameon=False)
        return _save(fig, path)


def degree_histogram(G: Graph, path: Path, title: str = "") -> Path:
    deg = G.degrees
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3))
        bins = np.arange(deg.min(), deg.max() + 2) - 0.5
        ax.hist(deg, bins=bins, color="tab:blue", edgecolor="white")
        ax.set_xlabel("degree")
        ax.set_ylabel("vertices")
        ax.set_title(title or f"n={G.n}, m={G.m}")
        return _save(fig, path)


def adjacency_plot(G: Graph, path: Path, title: str = "") -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4, 4))
        ax.spy(G.adjacency, markersize=max(0.5, 120 / max(G.n, 1)), color="k")
        ax.set_title(title or f"adjacency, n={G.n}")
        ax.grid(False)
        return _save(fig, path)


def ratio_samples(G, samples: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """(moved points, symdiff / moved) for seeded uniform permutations."""
    n = G.n
    rng = np.random.default_rng(seed)
    P = np.array([rng.permutation(n) for _ in range(samples)], dtype=np.int64)
    moved = (P != np.arange(n)).sum(axis=1)
    keep = moved > 0
    sd = SupportTensor.build(G).symdiff_batch(P[keep])
    return moved[keep], sd / moved[keep]


def ratio_profile(G, path: Path, samples: int = 2000, seed: int = 0, floor: float | None = None) -> Path:
    """Scatter of symdiff per moved point against the number of moved points."""
    moved, ratio = ratio_samples(G, samples, seed)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3.2))
        jitter = np.random.default_rng(seed).uniform(-0.2, 0.2, moved.size)
        ax.scatter(moved + jitter, ratio, s=4, alpha=0.35, color="tab:purple")
        if floor is not None:
            ax.axhline(floor, color="tab:red", lw=1, ls="--", label=f"minimum {floor:.3g}")
            ax.legend(frameon=False)
        ax.set_xlabel("moved points")
        ax.set_ylabel("symdiff / moved")
        ax.set_title(f"{samples} seeded permutations (seed {seed})")
        return _save(fig, path)
