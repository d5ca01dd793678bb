"""Figures written next to the CLI's TSV output.

Everything renders off-screen with the Agg backend; each function writes one
file and returns its path.
"""

from __future__ import annotations

import os
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .sparse import DenseVector, SparseMatrix  # noqa: E402

__all__ = ["plot_scores", "plot_matrix", "plot_truss", "plot_nmf", "figure_style"]

figure_style = {
    "figure.figsize": (6.4, 4.0),
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "legend.fontsize": 8,
    "legend.frameon": False,
    # fixed metadata keeps repeated renders byte-identical
    "svg.hashsalt": "graphulo",
}

_MAX_TICKS = 40


def _save(fig, path: str | os.PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"Software": None} if path.suffix.lower() == ".png" else None
    fig.savefig(path, bbox_inches="tight", metadata=metadata)
    plt.close(fig)
    return path


def _labels(keys) -> list[str]:
    return [str(k) for k in keys]


def plot_scores(scores: DenseVector, path, title: str = "", ylabel: str = "score") -> Path:
    with plt.rc_context(figure_style):
        fig, ax = plt.subplots()
        x = np.arange(len(scores))
        ax.bar(x, scores.to_numpy(), color="#4c72b0")
        if len(scores) <= _MAX_TICKS:
            ax.set_xticks(x, _labels(scores.keys), rotation=90 if len(scores) > 12 else 0)
        ax.set_xlabel("vertex")
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        return _save(fig, path)


def plot_matrix(A: SparseMatrix, path, title: str = "", cmap: str = "viridis") -> Path:
    """Heat map of a (small) matrix; absent entries are left blank."""
    with plt.rc_context(figure_style):
        fig, ax = plt.subplots(figsize=(5.0, 4.2))
        dense = np.full(A.shape, np.nan)
        for i, j, v in A.items():
            dense[i, j] = v
        im = ax.imshow(dense, cmap=cmap, interpolation="nearest", aspect="auto")
        fig.colorbar(im, ax=ax, shrink=0.85)
        if A.shape[0] <= _MAX_TICKS:
            ax.set_yticks(range(A.shape[0]), _labels(A.rows))
        if A.shape[1] <= _MAX_TICKS:
            ax.set_xticks(range(A.shape[1]), _labels(A.cols), rotation=90)
        ax.set_title(title)
        return _save(fig, path)


def plot_truss(decomposition: dict[int, SparseMatrix], path, title: str = "truss decomposition") -> Path:
    with plt.rc_context(figure_style):
        fig, ax = plt.subplots()
        ks = sorted(decomposition)
        ax.bar(ks, [len(decomposition[k].nonempty_rows()) for k in ks], color="#55a868")
        ax.set_xticks(ks)
        ax.set_xlabel("k")
        ax.set_ylabel("edges in maximal k-truss")
        ax.set_title(title)
        return _save(fig, path)


def plot_nmf(W: SparseMatrix, H: SparseMatrix, residuals: list[float], path, title: str = "") -> Path:
    """Residual history on the left, topic-by-column weights on the right."""
    with plt.rc_context(figure_style):
        fig, (left, right) = plt.subplots(1, 2, figsize=(9.0, 3.6),
                                          gridspec_kw={"width_ratios": [1, 1.6]})
        its = np.arange(1, len(residuals) + 1)
        left.plot(its, residuals, color="#c44e52")
        if residuals and min(residuals) > 0:
            left.set_yscale("log")
        left.set_xlabel("outer iteration")
        left.set_ylabel(r"$\|A - WH\|_F$")
        im = right.imshow(H.to_dense(), aspect="auto", cmap="magma_r", interpolation="nearest")
        fig.colorbar(im, ax=right, shrink=0.85)
        right.set_yticks(range(H.shape[0]), _labels(H.rows))
        if H.shape[1] <= _MAX_TICKS:
            right.set_xticks(range(H.shape[1]), _labels(H.cols), rotation=90)
        right.set_ylabel("topic")
        right.set_title("H")
        if title:
            fig.suptitle(title)
        return _save(fig, path)
