"""Direction and frame search used by the certificate classifiers.

Every supporting-object search reduces to: given "blocked caps" on a unit
sphere (one cap per obstacle point), find a direction outside all of them.
Circles are handled with a conservative angular bin cover, higher spheres
with a conservative candidate test.  Both only ever err towards reporting
a direction as blocked.
"""

from __future__ import annotations

import numpy as np

from .geometry import complete_basis, orthonormalize, random_frame


def sphere_points(d: int, count: int, seed: int = 0) -> np.ndarray:
    """Quasi-uniform unit vectors in R^d (deterministic)."""
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        a = 2 * np.pi * np.arange(count) / count
        return np.stack([np.cos(a), np.sin(a)], axis=1)
    if d == 3:
        i = np.arange(count) + 0.5
        z = 1 - 2 * i / count
        phi = np.pi * (1 + 5 ** 0.5) * i
        r = np.sqrt(1 - z * z)
        return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    g = np.random.default_rng(seed).standard_normal((count, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def covering_radius(d: int, count: int) -> float:
    """Angular radius such that caps of this size around ``sphere_points`` cover the sphere."""
    if d == 1:
        return 0.0
    if d == 2:
        return np.pi / count
    if d == 3:
        return 2.2 * np.sqrt(4 * np.pi / count) / 2
    # crude bound for random points on S^3
    return 2.5 * (2 * np.pi ** 2 / count) ** (1 / 3) / 2


def free_circle(angles: np.ndarray, halves: np.ndarray):
    """Free direction on S^1 outside the closed arcs ``[angle - half, angle + half]``.

    ``angles``/``halves`` have shape ``(F, m)`` (F independent problems);
    a negative half-width marks an arc that blocks nothing.  Exact sweep:
    arcs sorted by start and repeated one period later, so every gap in the
    second period is a free arc.  Returns ``(ok, best_angle, clearance)``
    arrays of shape ``(F,)``; the answer is the middle of the widest gap and
    clearance is half its width.
    """
    angles = np.atleast_2d(np.asarray(angles, dtype=float))
    halves = np.atleast_2d(np.asarray(halves, dtype=float))
    F, m = angles.shape
    two_pi = 2 * np.pi
    ok = np.zeros(F, bool)
    best = np.zeros(F)
    clear = np.zeros(F)
    full = np.any(halves >= np.pi, axis=1)
    live = halves >= 0
    start = np.mod(angles - halves, two_pi)
    end = start + 2 * halves
    start = np.where(live, start, np.inf)
    end = np.where(live, end, -np.inf)
    order = np.argsort(start, axis=1)
    s1 = np.take_along_axis(start, order, axis=1)
    e1 = np.take_along_axis(end, order, axis=1)
    s2 = np.concatenate([s1, s1 + two_pi], axis=1)
    e2 = np.concatenate([e1, e1 + two_pi], axis=1)
    reach = np.maximum.accumulate(e2, axis=1)
    gap = s2[:, m:] - reach[:, m - 1:-1]  # gap before each second-period start
    gap = np.where(np.isfinite(gap), gap, -np.inf)
    nlive = live.sum(axis=1)
    for f in range(F):
        if full[f]:
            continue
        if nlive[f] == 0:
            ok[f], best[f], clear[f] = True, 0.0, np.pi
            continue
        j = int(np.argmax(gap[f]))
        if gap[f, j] > 0:
            ok[f] = True
            lo = reach[f, m - 1 + j]
            best[f] = float(np.mod(lo + gap[f, j] / 2, two_pi))
            clear[f] = float(gap[f, j] / 2)
    return ok, best, clear


def free_on_sphere(centers: np.ndarray, cos_half: np.ndarray, candidates: np.ndarray, slack: float):
    """Candidate direction whose cap-test passes with angular ``slack``.

    ``centers``: (m, d) unit vectors; blocked set around each is the cap with
    ``cos(angle) >= cos_half``.  A candidate is free when it lies outside all
    caps enlarged by ``slack``.  Returns ``(index or None, clearance)``.
    """
    if len(centers) == 0:
        return 0, np.pi
    half = np.arccos(np.clip(cos_half, -1, 1))
    thr = np.cos(np.minimum(half + slack, np.pi))
    dots = candidates @ centers.T
    free = ~np.any(dots >= thr[None, :], axis=1)
    if not free.any():
        return None, 0.0
    idx = np.flatnonzero(free)
    ang = np.arccos(np.clip(dots[idx], -1, 1))
    margin = (ang - half[None, :]).min(axis=1)
    j = int(np.argmax(margin))
    return int(idx[j]), float(margin[j])


def tangent_frames(normal: np.ndarray, k: int, count: int) -> list[np.ndarray]:
    """k-frames inside the hyperplane orthogonal to ``normal``."""
    n = normal.shape[0]
    tang = complete_basis(normal[None, :], n)  # (n-1, n)
    if k > n - 1:
        return []
    if k == n - 1:
        return [tang]
    if k == 1 and n - 1 == 2:
        a = np.pi * np.arange(count) / count
        return [(np.cos(t) * tang[0] + np.sin(t) * tang[1])[None, :] for t in a]
    rng = np.random.default_rng(12345)
    out = []
    for _ in range(count):
        c = random_frame(rng, n - 1, k)
        out.append(c @ tang)
    return out


def frames_containing(base: np.ndarray, total: int, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Orthonormal frames of ``total`` vectors whose span contains ``base`` rows."""
    n = base.shape[1]
    extra = total - base.shape[0]
    if extra == 0:
        return [base]
    comp = complete_basis(base, n)
    if extra == comp.shape[0]:
        return [np.vstack([base, comp])]
    if extra == 1 and comp.shape[0] == 2:
        a = np.pi * np.arange(count) / count
        return [np.vstack([base, np.cos(t) * comp[0] + np.sin(t) * comp[1]]) for t in a]
    out = []
    for _ in range(count):
        c = random_frame(rng, comp.shape[0], extra)
        out.append(np.vstack([base, c @ comp]))
    return out


def axis_frames(n: int, k: int) -> list[np.ndarray]:
    """All k-frames made of coordinate axes."""
    from itertools import combinations

    eye = np.eye(n)
    return [eye[list(c)] for c in combinations(range(n), k)]


def random_frames(n: int, k: int, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    if k == 0:
        return [np.zeros((0, n))]
    if n == 2 and k == 1:
        a = np.pi * np.arange(count) / count
        return [np.array([[np.cos(t), np.sin(t)]]) for t in a]
    if k == 1 or k == n - 1:
        pts = sphere_points(n, 2 * count, seed=int(rng.integers(1 << 31)))
        pts = pts[pts[:, -1] >= 0][:count] if n != 4 else pts[:count]
        if k == 1:
            return [p[None, :] for p in pts]
        return [complete_basis(p[None, :], n) for p in pts]
    return [random_frame(rng, n, k) for _ in range(count)]


__all__ = [
    "sphere_points",
    "covering_radius",
    "free_circle",
    "free_on_sphere",
    "tangent_frames",
    "frames_containing",
    "axis_frames",
    "random_frames",
    "orthonormalize",
]
