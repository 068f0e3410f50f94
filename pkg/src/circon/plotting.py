"""Matplotlib figures written next to the text reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .bodies import GridBody, aligned  # noqa: E402

_META = {"Software": None}


def _slice2d(b: GridBody, axis: int = 2, index: int | None = None) -> np.ndarray:
    occ = b.occupancy
    if occ.ndim == 2:
        return occ
    if index is None:
        # the slice with most occupied cells
        other = tuple(a for a in range(occ.ndim) if a != axis)
        index = int(np.argmax(occ.sum(axis=other)))
    sl = np.take(occ, index, axis=axis)
    while sl.ndim > 2:
        sl = sl.any(axis=-1)
    return sl


def _extent(b: GridBody):
    lo, hi = b.lo, b.hi
    return [lo[0], hi[0], lo[1], hi[1]]


def save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=100, metadata=_META)
    plt.close(fig)
    return path


def plot_body(b: GridBody, path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.imshow(_slice2d(b).T, origin="lower", extent=_extent(b), cmap="Greys", interpolation="nearest")
    ax.set_aspect("equal")
    ax.set_title(title)
    return save(fig, path)


def plot_hull(b: GridBody, hull: GridBody, path, title: str = "") -> Path:
    """Body cells black, extra hull cells grey."""
    x, y = aligned(b, hull)
    img = np.where(x, 2, np.where(y, 1, 0))
    ref = hull if hull.count >= b.count else b
    sub = GridBody(np.ones_like(x), ref.h, np.minimum(b.index_origin, hull.index_origin))
    fig, ax = plt.subplots(figsize=(5, 5))
    view = img if img.ndim == 2 else _slice2d(GridBody(img > 0, sub.h, sub.index_origin)) * 1
    if img.ndim > 2:
        idx = int(np.argmax((img == 2).sum(axis=(0, 1))))
        view = img[:, :, idx]
    ax.imshow(view.T, origin="lower", extent=_extent(sub), cmap="Greys", vmin=0, vmax=2,
              interpolation="nearest")
    ax.set_aspect("equal")
    ax.set_title(title)
    return save(fig, path)


def plot_profiles(profiles, path, title: str = "") -> Path:
    """One row per radial profile, occupied bins drawn as dark cells."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for row, prof in enumerate(profiles):
        idx = prof.indices
        ax.scatter((idx + 0.5) * prof.spacing, np.full(len(idx), row), s=2, c="k", marker="s")
    ax.set_xlabel("radius")
    ax.set_ylabel("profile")
    ax.set_title(title)
    return save(fig, path)


def plot_residuals(values, path, xlabel: str = "member", ylabel: str = "residual", title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(np.arange(len(values)), values, "k.-", lw=0.8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    return save(fig, path)


__all__ = ["plot_body", "plot_hull", "plot_profiles", "plot_residuals", "save"]
