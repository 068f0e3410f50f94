"""Compact bodies: analytic membership predicates and occupancy grids.

Grids live on a global lattice: cell ``i`` of a body with spacing ``h`` has
its lower corner at ``origin + i*h`` where ``origin`` is an integer multiple
of ``h``.  Two bodies rasterized at the same ``h`` are therefore always
cell-aligned and can be compared by index arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import ndimage
from scipy.spatial import ConvexHull, QhullError

from . import formats
from .errors import EmptyBody, ResolutionTooCoarse, ValidationError
from .geometry import SUPPORTED_DIMS

Membership = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class ImplicitBody:
    """Vectorized membership predicate over ``(m, n)`` point arrays plus a bounding box."""

    membership: Membership
    lo: np.ndarray
    hi: np.ndarray
    name: str = "body"

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValidationError("bounding box corners must be matching 1-D arrays")
        if lo.shape[0] not in SUPPORTED_DIMS:
            raise ValidationError(f"dimension {lo.shape[0]} not supported")
        if np.any(hi <= lo):
            raise ValidationError("bounding box is degenerate")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def n(self) -> int:
        return self.lo.shape[0]

    def __call__(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        inside_box = np.all((pts >= self.lo) & (pts <= self.hi), axis=1)
        out = np.zeros(len(pts), dtype=bool)
        if inside_box.any():
            out[inside_box] = self.membership(pts[inside_box])
        return out

    def transformed(self, rotation=None, shift=None, about=None) -> "ImplicitBody":
        """Body ``{R (x - about) + about + shift : x in self}``."""
        n = self.n
        R = np.eye(n) if rotation is None else np.asarray(rotation, dtype=float)
        t = np.zeros(n) if shift is None else np.asarray(shift, dtype=float)
        p = np.zeros(n) if about is None else np.asarray(about, dtype=float)
        corners = np.array(np.meshgrid(*zip(self.lo, self.hi), indexing="ij")).reshape(n, -1).T
        moved = (corners - p) @ R.T + p + t
        base = self.membership
        lo0, hi0 = self.lo, self.hi

        def member(x):
            y = (x - p - t) @ R + p
            ok = np.all((y >= lo0) & (y <= hi0), axis=1)
            out = np.zeros(len(x), dtype=bool)
            if ok.any():
                out[ok] = base(y[ok])
            return out

        return ImplicitBody(member, moved.min(axis=0), moved.max(axis=0), self.name)

    def union(self, other: "ImplicitBody") -> "ImplicitBody":
        a, b = self, other
        return ImplicitBody(lambda x: a(x) | b(x), np.minimum(a.lo, b.lo), np.maximum(a.hi, b.hi),
                            f"{a.name}+{b.name}")


@dataclass(frozen=True, eq=False)
class BodyMetrics:
    diameter: float
    volume: float
    component_count: int
    boundary_component_count: int


class GridBody:
    """Immutable boolean occupancy grid on the global lattice of spacing ``h``."""

    __slots__ = ("occupancy", "index_origin", "h")

    def __init__(self, occupancy, h: float, index_origin, allow_empty: bool = False):
        occ = np.array(occupancy, dtype=bool)
        if occ.ndim not in SUPPORTED_DIMS:
            raise ValidationError(f"dimension {occ.ndim} not supported")
        if not h > 0:
            raise ValidationError("spacing must be positive")
        if not allow_empty and not occ.any():
            raise EmptyBody("bodies must have at least one occupied cell")
        io = np.asarray(index_origin, dtype=np.int64).reshape(occ.ndim)
        occ.flags.writeable = False
        io.flags.writeable = False
        object.__setattr__(self, "occupancy", occ)
        object.__setattr__(self, "index_origin", io)
        object.__setattr__(self, "h", float(h))

    def __setattr__(self, key, value):
        raise AttributeError("GridBody is immutable")

    # -- geometry of the lattice -------------------------------------------------
    @property
    def n(self) -> int:
        return self.occupancy.ndim

    @property
    def shape(self) -> tuple:
        return self.occupancy.shape

    @property
    def origin(self) -> np.ndarray:
        return self.index_origin * self.h

    @property
    def lo(self) -> np.ndarray:
        return self.origin

    @property
    def hi(self) -> np.ndarray:
        return self.origin + np.array(self.shape) * self.h

    def centers(self, idx) -> np.ndarray:
        """Centers of cells given as an ``(m, n)`` integer index array."""
        return (np.asarray(idx) + self.index_origin + 0.5) * self.h

    def all_centers(self) -> np.ndarray:
        return self.centers(np.indices(self.shape).reshape(self.n, -1).T)

    def occupied_indices(self) -> np.ndarray:
        return np.argwhere(self.occupancy)

    def occupied_centers(self) -> np.ndarray:
        return self.centers(self.occupied_indices())

    def cell_of(self, pts) -> np.ndarray:
        """Local index of the cell containing each point (may be out of range)."""
        pts = np.asarray(pts, dtype=float)
        return np.floor(pts / self.h).astype(np.int64) - self.index_origin

    def contains(self, pts) -> np.ndarray:
        """Nearest-cell membership of points."""
        idx = np.atleast_2d(self.cell_of(np.atleast_2d(pts)))
        ok = np.all((idx >= 0) & (idx < np.array(self.shape)), axis=1)
        out = np.zeros(len(idx), dtype=bool)
        out[ok] = self.occupancy[tuple(idx[ok].T)]
        return out

    @property
    def count(self) -> int:
        return int(self.occupancy.sum())

    @property
    def volume(self) -> float:
        return self.count * self.h ** self.n

    def with_occupancy(self, occ, allow_empty: bool = False) -> "GridBody":
        return GridBody(occ, self.h, self.index_origin, allow_empty=allow_empty)

    def padded(self, cells) -> "GridBody":
        pad = np.broadcast_to(np.asarray(cells, dtype=np.int64), (self.n,))
        occ = np.pad(self.occupancy, [(int(p), int(p)) for p in pad])
        return GridBody(occ, self.h, self.index_origin - pad, allow_empty=True)

    def embed(self, index_origin, shape) -> np.ndarray:
        """Occupancy resampled onto another window of the same lattice."""
        index_origin = np.asarray(index_origin, dtype=np.int64)
        out = np.zeros(tuple(int(s) for s in shape), dtype=bool)
        off = self.index_origin - index_origin
        src, dst = [], []
        for o, s_src, s_dst in zip(off, self.shape, out.shape):
            a = max(0, o)
            b = min(s_dst, o + s_src)
            if b <= a:
                return out
            dst.append(slice(a, b))
            src.append(slice(a - o, b - o))
        out[tuple(dst)] = self.occupancy[tuple(src)]
        return out

    def cropped(self) -> "GridBody":
        """Smallest window holding all occupied cells."""
        idx = self.occupied_indices()
        if len(idx) == 0:
            return self
        a, b = idx.min(axis=0), idx.max(axis=0) + 1
        sl = tuple(slice(int(x), int(y)) for x, y in zip(a, b))
        return GridBody(self.occupancy[sl], self.h, self.index_origin + a)

    # -- serialization -------------------------------------------------------------
    def save(self, path, meta: dict | None = None):
        m = {"index_origin": " ".join(str(int(v)) for v in self.index_origin)}
        m.update(meta or {})
        return formats.write_grid(path, self.occupancy, self.origin, self.h, m)

    @classmethod
    def load(cls, path) -> "GridBody":
        occ, origin, h, meta = formats.read_grid(path)
        if "index_origin" in meta:
            io = np.array([int(v) for v in meta["index_origin"].split()])
        else:
            io = np.rint(origin / h).astype(np.int64)
        return cls(occ, h, io, allow_empty=True)

    def __repr__(self):
        return f"GridBody(n={self.n}, shape={self.shape}, h={self.h}, cells={self.count})"


def _check_same_lattice(a: GridBody, b: GridBody):
    if a.n != b.n or a.h != b.h:
        raise ValidationError("bodies live on different lattices")


def common_window(*bodies: GridBody):
    _check_same_lattice(bodies[0], bodies[-1])
    for b in bodies[1:]:
        _check_same_lattice(bodies[0], b)
    lo = np.min([b.index_origin for b in bodies], axis=0)
    hi = np.max([b.index_origin + np.array(b.shape) for b in bodies], axis=0)
    return lo, hi - lo


def aligned(*bodies: GridBody) -> list[np.ndarray]:
    io, shape = common_window(*bodies)
    return [b.embed(io, shape) for b in bodies]


def is_subset(a: GridBody, b: GridBody) -> bool:
    """Cellwise ``a ⊆ b``."""
    x, y = aligned(a, b)
    return bool(np.all(~x | y))


def symmetric_difference_volume(a: GridBody, b: GridBody) -> float:
    x, y = aligned(a, b)
    return float(np.count_nonzero(x ^ y)) * a.h ** a.n


def boundary_measure(b: GridBody) -> float:
    """Crude (n-1)-measure of the boundary: boundary cells times ``h^(n-1)``."""
    return len(boundary_cells(b)) * b.h ** (b.n - 1)


def coincide(a: GridBody, b: GridBody, factor: float = 2.0) -> bool:
    """Equality up to discretization noise concentrated at the boundary."""
    tol = factor * a.h * max(boundary_measure(a), boundary_measure(b))
    return symmetric_difference_volume(a, b) <= tol


# -- rasterization ---------------------------------------------------------------------
def lattice_window(lo, hi, h: float, margin: int = 1):
    """Index origin and shape of the lattice window covering ``[lo, hi]``."""
    lo_i = np.floor(np.asarray(lo, dtype=float) / h + 1e-9).astype(np.int64) - margin
    hi_i = np.ceil(np.asarray(hi, dtype=float) / h - 1e-9).astype(np.int64) + margin
    return lo_i, hi_i - lo_i


def rasterize(body: ImplicitBody, h: float, window=None) -> GridBody:
    """Cell occupied iff the predicate holds at its center."""
    if not h > 0:
        raise ValidationError("h must be positive")
    if window is None:
        io, shape = lattice_window(body.lo, body.hi, h)
        if np.any(shape - 2 < 4):
            raise ResolutionTooCoarse(f"fewer than 4 cells per axis at h={h}")
    else:
        io, shape = (np.asarray(w, dtype=np.int64) for w in window)
    empty = GridBody(np.zeros(tuple(int(s) for s in shape), bool), h, io, allow_empty=True)
    occ = body(empty.all_centers()).reshape(empty.shape)
    if not occ.any():
        raise EmptyBody(f"{body.name}: no cell center inside the body at h={h}")
    return GridBody(occ, h, io)


# -- topology and measurements ----------------------------------------------------------
def boundary_mask(b: GridBody) -> np.ndarray:
    occ = b.occupancy
    padded = np.pad(occ, 1)
    interior = padded.copy()
    for ax in range(b.n):
        interior &= np.roll(padded, 1, axis=ax) & np.roll(padded, -1, axis=ax)
    return occ & ~interior[(slice(1, -1),) * b.n]


def boundary_cells(b: GridBody) -> set[tuple[int, ...]]:
    return {tuple(int(v) for v in i) for i in np.argwhere(boundary_mask(b))}


def erosion_mask(b: GridBody, delta: float) -> np.ndarray:
    """Cells whose center lies at distance > ``delta`` from every unoccupied cell center."""
    pad = int(np.ceil(delta / b.h)) + 1
    occ = np.pad(b.occupancy, pad)
    dist = ndimage.distance_transform_edt(occ) * b.h
    return (dist > delta)[(slice(pad, -pad),) * b.n]


def diameter(b: GridBody) -> float:
    pts = b.centers(np.argwhere(boundary_mask(b)))
    if len(pts) > 64:
        try:
            hull = ConvexHull(pts)
            pts = pts[hull.vertices]
        except QhullError:
            pass
    if len(pts) < 2:
        return 0.0
    best = 0.0
    for i in range(0, len(pts), 512):
        d = np.linalg.norm(pts[i:i + 512, None, :] - pts[None, :, :], axis=-1)
        best = max(best, float(d.max()))
    return best


def metrics(b: GridBody) -> BodyMetrics:
    face = ndimage.generate_binary_structure(b.n, 1)
    full = ndimage.generate_binary_structure(b.n, b.n)
    _, ncomp = ndimage.label(b.occupancy, structure=face)
    # boundary rims of rasterized curved bodies are only diagonally connected
    _, nbd = ndimage.label(boundary_mask(b), structure=full)
    return BodyMetrics(diameter(b), b.volume, int(ncomp), int(nbd))


def _hull_halfspaces(pts: np.ndarray):
    """Return (projector to affine span, equations) or raise for a single point."""
    mean = pts.mean(axis=0)
    _, s, vt = np.linalg.svd(pts - mean, full_matrices=False)
    rank = int(np.sum(s > 1e-9 * max(1.0, s[0] if len(s) else 1.0)))
    return mean, vt[:rank], rank


def convex_hull(b: GridBody, tol: float | None = None) -> GridBody:
    """Cells whose centers lie in the convex hull of the occupied centers."""
    tol = 1e-6 * b.h if tol is None else tol
    pts = b.centers(np.argwhere(boundary_mask(b)))
    mean, frame, rank = _hull_halfspaces(pts)
    lo = b.occupied_indices().min(axis=0)
    hi = b.occupied_indices().max(axis=0) + 1
    sub = tuple(slice(int(x), int(y)) for x, y in zip(lo, hi))
    idx = np.indices(tuple(int(v) for v in hi - lo)).reshape(b.n, -1).T + lo
    c = b.centers(idx)
    rel = c - mean
    coords = rel @ frame.T
    resid = np.linalg.norm(rel - coords @ frame, axis=1)
    inside = resid <= tol
    if rank == 0:
        pass
    elif rank == 1:
        t = (pts - mean) @ frame.T
        inside &= (coords[:, 0] >= t.min() - tol) & (coords[:, 0] <= t.max() + tol)
    else:
        hull = ConvexHull((pts - mean) @ frame.T)
        eq = hull.equations
        inside &= np.all(coords @ eq[:, :-1].T + eq[:, -1] <= tol, axis=1)
    occ = np.zeros(b.shape, dtype=bool)
    occ[sub] = inside.reshape(tuple(int(v) for v in hi - lo))
    return b.with_occupancy(occ | b.occupancy)
