"""Certificate-search membership tests for the k-convex / k-visible classes.

A witness is a boundary cell (``i = 1`` classes) or an exterior cell
(``i = 2``).  For every witness the search looks for a supporting object:
a half-plane whose k-dimensional boundary passes through the witness, a
k-plane through it (weak classes), or a (k+1)-ball of radius ``1/eps``
with the witness on its boundary sphere (eps-classes).  Obstacles are the
cell centers of the body eroded by ``delta`` (supporting objects must avoid
the interior) or of the body itself (disjoint objects).

Only membership is certified.  ``NO_CERTIFICATE`` means the finite search
budget found nothing, which is the semi-decidable side.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from . import search
from .bodies import GridBody, boundary_mask, erosion_mask
from .errors import BadBudget, UnsupportedCombination, ValidationError
from .geometry import AffineSubspace, HalfPlane, complete_basis

CLASS_IDS = ("K1", "K2", "V1", "V2", "K1w", "K2w", "V1w", "V2w", "Keps1", "Keps2", "Veps1", "Veps2")

MEMBER = "MEMBER"
NO_CERTIFICATE = "NO_CERTIFICATE"


class Status(str, Enum):
    SUPPORTING = "SUPPORTING"
    DISJOINT = "DISJOINT"
    INTERSECTS_INTERIOR = "INTERSECTS_INTERIOR"


@dataclass(frozen=True)
class Ball:
    """(d)-ball of ``radius`` around ``center`` inside the ``carrier`` plane."""

    center: np.ndarray
    radius: float
    carrier: AffineSubspace


@dataclass(frozen=True)
class SupportingObject:
    kind: str  # "HalfPlane" | "Plane" | "Ball" | "Sphere"
    geometry: object
    status: Status = Status.SUPPORTING


@dataclass
class SearchBudget:
    frames: int | None = None
    directions: int = 64
    max_boundary: int = 2000
    max_exterior: int = 5000
    max_failures: int = 10
    max_certificates: int = 20
    tangent_frames: int = 16
    seed: int = 0

    def __post_init__(self):
        for name in ("directions", "max_boundary", "max_exterior", "max_failures"):
            if getattr(self, name) < 1:
                raise BadBudget(f"{name} must be positive")
        if self.frames is not None and self.frames < 1:
            raise BadBudget("frames must be positive")

    def frame_count(self, n: int) -> int:
        if self.frames is not None:
            return self.frames
        return 1024 if n >= 4 else 256


@dataclass
class ClassVerdict:
    class_id: str
    k: int
    eps: float | None
    verdict: str
    witnesses_checked: int
    failures: list = field(default_factory=list)
    certificates: dict = field(default_factory=dict)
    budget: SearchBudget | None = None
    m: int | None = None

    @property
    def member(self) -> bool:
        return self.verdict == MEMBER

    def report(self) -> str:
        lines = [
            f"class {self.class_id}",
            f"k {self.k}",
            f"eps {'-' if self.eps is None else repr(float(self.eps))}",
            f"verdict {self.verdict}",
            f"witnesses_checked {self.witnesses_checked}",
        ]
        if self.budget is not None:
            b = self.budget
            lines.append(f"budget frames={b.frames} directions={b.directions} seed={b.seed}")
        for w, reason in self.failures:
            coords = " ".join(f"{c:.6f}" for c in np.ravel(w))
            lines.append(f"failure {coords} {reason}")
        return "\n".join(lines) + "\n"


# -- obstacle sets ---------------------------------------------------------------------
class _Obstacles:
    """Cell centers that an object may not approach closer than ``tol``."""

    def __init__(self, centers: np.ndarray, tol: float):
        self.centers = centers
        self.tol = tol
        self._tree = None

    @property
    def tree(self) -> cKDTree:
        if self._tree is None:
            self._tree = cKDTree(self.centers) if len(self.centers) else None
        return self._tree

    def hit(self, samples: np.ndarray) -> bool:
        if self.tree is None or len(samples) == 0:
            return False
        d, _ = self.tree.query(samples, k=1, distance_upper_bound=self.tol * (1 + 1e-9))
        return bool(np.any(np.isfinite(d)))


class BodyContext:
    """Per-body precomputation shared by all class searches."""

    def __init__(self, b: GridBody, delta: float | None = None):
        self.body = b
        self.h = b.h
        self.delta = 2 * b.h if delta is None else float(delta)
        if self.delta < b.h:
            raise ValidationError("delta must be at least the grid spacing")
        self.interior = _Obstacles(b.centers(np.argwhere(erosion_mask(b, self.delta + 1e-9 * b.h))), 0.4 * b.h)
        self.solid = _Obstacles(b.occupied_centers(), 0.5 * b.h)
        self.boundary_centers = b.centers(np.argwhere(boundary_mask(b)))
        self._bd_tree = cKDTree(self.boundary_centers)
        self._occ_tree = self.solid.tree

    def exterior_candidates(self, max_dist: float | None, pad_cells: int) -> np.ndarray:
        """Centers of unoccupied cells at distance >= delta from the body."""
        p = self.body.padded(pad_cells)
        dist = ndimage.distance_transform_edt(~p.occupancy) * self.h
        ok = (~p.occupancy) & (dist >= self.delta - 1e-9)
        if max_dist is not None:
            ok &= dist <= max_dist
        return p.centers(np.argwhere(ok))

    def outward_normal(self, x: np.ndarray, exterior: bool) -> np.ndarray:
        if exterior:
            _, j = self._occ_tree.query(x)
            v = x - self.solid.centers[j]
        else:
            idx = self._occ_tree.query_ball_point(x, 3 * self.h)
            v = x - self.solid.centers[idx].mean(axis=0) if idx else np.zeros_like(x)
        nv = np.linalg.norm(v)
        if nv < 1e-12:
            v = np.zeros_like(x)
            v[0] = 1.0
            return v
        return v / nv

    def dist_to_body(self, pts) -> np.ndarray:
        d, _ = self._occ_tree.query(np.atleast_2d(pts))
        return d


# -- per-frame searches ----------------------------------------------------------------
_CHUNK = 32


def _chunks(frames, size=_CHUNK):
    # small leading chunks: most witnesses succeed on one of the first frames
    i, step = 0, 2
    while i < len(frames):
        yield frames[i:i + step]
        i += step
        step = min(2 * step, size)


def _search_halfplane(x, obst: _Obstacles, frames, budget: SearchBudget):
    """Half-plane with boundary ``x + span(U)`` avoiding the obstacles.

    Returns ``(U, e, clearance)`` for the first frame that admits one, else None.
    """
    n = x.shape[0]
    V = obst.centers - x
    tol = obst.tol
    for chunk in _chunks(frames):
        U = np.stack(chunk)
        W = np.stack([complete_basis(u, n) for u in chunk])
        d = W.shape[1]
        if len(V) == 0:
            return chunk[0], W[0][0], np.inf
        w = np.matmul(V[None], W.transpose(0, 2, 1))
        rad = np.linalg.norm(w, axis=2)
        if d == 1:
            for f in range(len(chunk)):
                for s in (1.0, -1.0):
                    margin = float(np.min(-s * w[f, :, 0])) - tol
                    if margin > 0:
                        return chunk[f], s * W[f, 0], margin
        elif d == 2:
            ang = np.arctan2(w[..., 1], w[..., 0])
            half = np.where(rad <= tol, np.pi, np.arcsin(np.minimum(1.0, tol / np.maximum(rad, 1e-300))))
            ok, best, clear = search.free_circle(ang, half)
            if ok.any():
                f = int(np.flatnonzero(ok)[np.argmax(clear[ok])])
                e = np.cos(best[f]) * W[f, 0] + np.sin(best[f]) * W[f, 1]
                return chunk[f], e, float(clear[f])
        else:
            cands = search.sphere_points(d, 8 * budget.directions, seed=budget.seed)
            slack = 1e-3
            for f in range(len(chunk)):
                if np.any(rad[f] <= tol):
                    continue
                cen = w[f] / rad[f][:, None]
                cos_half = np.sqrt(1 - (tol / rad[f]) ** 2)
                j, clear = search.free_on_sphere(cen, cos_half, cands, slack)
                if j is not None:
                    return chunk[f], cands[j] @ W[f], clear
    return None


def _search_plane(x, obst: _Obstacles, frames):
    """k-plane ``x + span(U)`` staying ``tol`` away from every obstacle."""
    n = x.shape[0]
    V = obst.centers - x
    for chunk in _chunks(frames):
        if len(V) == 0:
            return chunk[0], np.inf
        U = np.stack(chunk)
        along = np.matmul(V[None], U.transpose(0, 2, 1))
        dist2 = np.sum(V * V, axis=1)[None, :] - np.sum(along ** 2, axis=2)
        dmin = np.sqrt(np.maximum(dist2.min(axis=1), 0))
        good = np.flatnonzero(dmin > obst.tol)
        if len(good):
            f = int(good[np.argmax(dmin[good])])
            return chunk[f], float(dmin[f] - obst.tol)
    return None


def _ball_caps(V, F, R, tol):
    """Blocking caps for the center direction ``u`` of a ball ``B_F(x + R u, R)``."""
    a = np.matmul(V[None], F.transpose(0, 2, 1))
    amag = np.linalg.norm(a, axis=2)
    r2 = np.sum(V * V, axis=1)[None, :] - amag ** 2
    close = r2 <= tol * tol
    t = np.sqrt(np.maximum(tol * tol - r2, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        cos_half = (amag ** 2 - 2 * R * t - t * t) / (2 * R * amag)
    cos_half = np.where(amag < 1e-300, -2.0, cos_half)
    return a, amag, close, cos_half


def _search_ball(x, obst: _Obstacles, frames, R: float, budget: SearchBudget):
    """Ball of radius ``R`` in ``x + span(F)`` with ``x`` on its boundary sphere."""
    V = obst.centers - x
    tol = obst.tol
    for chunk in _chunks(frames):
        F = np.stack(chunk)
        d = F.shape[1]
        if len(V) == 0:
            u = F[0][0]
            return chunk[0], u, np.inf
        if d == x.shape[0] and d >= 3:
            # full-dimensional balls: exact nearest-obstacle test per center direction
            cands = search.sphere_points(d, 8 * budget.directions, seed=budget.seed)
            dist, _ = obst.tree.query(x + R * cands, k=1)
            j = int(np.argmax(dist))
            if dist[j] > R + tol:
                return chunk[0], cands[j], float(dist[j] - R - tol)
            continue
        a, amag, close, cos_half = _ball_caps(V, F, R, tol)
        if d == 1:
            for f in range(len(chunk)):
                for s in (1.0, -1.0):
                    lhs = s * a[f, :, 0]
                    rhs = amag[f] * cos_half[f]
                    blocked = close[f] & (lhs >= rhs)
                    if not blocked.any():
                        return chunk[f], s * F[f, 0], 0.0
        elif d == 2:
            ang = np.arctan2(a[..., 1], a[..., 0])
            half = np.where(close, np.arccos(np.clip(cos_half, -1, 1)), -1.0)
            half = np.where(close & (cos_half <= -1), np.pi, half)
            half = np.where(close & (cos_half > 1), -1.0, half)
            ok, best, clear = search.free_circle(ang, half)
            if ok.any():
                f = int(np.flatnonzero(ok)[np.argmax(clear[ok])])
                u = np.cos(best[f]) * F[f, 0] + np.sin(best[f]) * F[f, 1]
                return chunk[f], u, float(clear[f])
        else:
            cands = search.sphere_points(d, 8 * budget.directions, seed=budget.seed)
            slack = 1e-3
            for f in range(len(chunk)):
                c = close[f] & (cos_half[f] <= 1)
                if np.any(c & (cos_half[f] <= -1)):
                    continue
                cen = a[f][c] / amag[f][c][:, None]
                j, clear = search.free_on_sphere(cen, cos_half[f][c], cands, slack)
                if j is not None:
                    return chunk[f], cands[j] @ F[f], clear
    return None


def _ball_clear(C, F, R, obst: _Obstacles, sphere_only: bool = False) -> bool:
    V = obst.centers - C
    if len(V) == 0:
        return True
    a = V @ F.T
    amag = np.linalg.norm(a, axis=1)
    r2 = np.maximum(np.sum(V * V, axis=1) - amag ** 2, 0)
    radial = np.abs(amag - R) if sphere_only else np.maximum(amag - R, 0)
    return bool(np.all(r2 + radial ** 2 > obst.tol ** 2))


# -- object sampling and validation ------------------------------------------------------
def _box_coords(frame: np.ndarray, origin: np.ndarray, lo, hi):
    """Range of frame coordinates of the box ``[lo, hi]`` relative to ``origin``."""
    n = origin.shape[0]
    corners = np.array(np.meshgrid(*zip(lo, hi), indexing="ij")).reshape(n, -1).T
    c = (corners - origin) @ frame.T
    return c.min(axis=0), c.max(axis=0)


def _grid_in(lo, hi, step, limit=2_000_000):
    extent = np.maximum(hi - lo, 0)
    count = np.floor(extent / step).astype(int) + 1
    while np.prod(count) > limit:
        step *= 1.25
        count = np.floor(extent / step).astype(int) + 1
    axes = [np.linspace(a, a + (c - 1) * step, c) for a, c in zip(lo, count)]
    return np.array(np.meshgrid(*axes, indexing="ij")).reshape(len(lo), -1).T


def sample_object(obj: SupportingObject, b: GridBody, spacing: float | None = None) -> np.ndarray:
    """Points of the object inside the body's window, spaced at most ``h/2``."""
    step = b.h / 2 if spacing is None else spacing
    lo, hi = b.lo - 2 * b.h, b.hi + 2 * b.h
    g = obj.geometry
    if obj.kind == "HalfPlane":
        frame = np.vstack([g.boundary.basis, g.direction])
        clo, chi = _box_coords(frame, g.boundary.base, lo, hi)
        clo[-1] = 0.0
        t = _grid_in(clo, chi, step)
        return g.boundary.base + t @ frame
    if obj.kind == "Plane":
        if g.dim == 0:
            return g.base[None, :]
        clo, chi = _box_coords(g.basis, g.base, lo, hi)
        return g.base + _grid_in(clo, chi, step) @ g.basis
    if obj.kind in ("Ball", "Sphere"):
        F = g.carrier.basis
        d = F.shape[0]
        if obj.kind == "Sphere" or d == 1:
            pts = search.sphere_points(d, max(8, int(np.ceil(2 * np.pi * g.radius / step)) if d == 2 else 4096))
            if obj.kind == "Ball" and d == 1:
                t = np.linspace(-g.radius, g.radius, int(np.ceil(2 * g.radius / step)) + 1)[:, None]
                return g.center + t @ F
            return g.center + g.radius * pts @ F
        t = _grid_in(-g.radius * np.ones(d), g.radius * np.ones(d), step)
        t = t[np.linalg.norm(t, axis=1) <= g.radius]
        rim = g.radius * search.sphere_points(d, max(16, int(np.ceil(2 * np.pi * g.radius / step))) if d == 2 else 4096)
        return g.center + np.vstack([t, rim]) @ F
    raise ValidationError(f"unknown object kind {obj.kind}")


def is_supporting(obj: SupportingObject, b: GridBody, delta: float | None = None,
                  context: BodyContext | None = None) -> Status:
    """Classify an object against the body by dense sampling.

    ``INTERSECTS_INTERIOR`` if a sample comes within ``0.4 h`` of a cell of
    the body eroded by ``delta``; otherwise ``SUPPORTING`` if some sample is
    within ``delta`` of an occupied cell, else ``DISJOINT``.
    """
    ctx = context if context is not None else BodyContext(b, delta)
    pts = sample_object(obj, b)
    if ctx.interior.hit(pts):
        return Status.INTERSECTS_INTERIOR
    near = _Obstacles(ctx.solid.centers, ctx.delta)
    if near.hit(pts):
        return Status.SUPPORTING
    return Status.DISJOINT


def revalidate(obj: SupportingObject, b: GridBody, context: BodyContext) -> bool:
    """Re-check a certificate in its claimed status (exact obstacle test on samples)."""
    pts = sample_object(obj, b)
    if obj.status == Status.DISJOINT:
        return not context.solid.hit(pts)
    return not context.interior.hit(pts)


# -- classification driver -----------------------------------------------------------------
def _witnesses(ctx: BodyContext, i: int, eps: float | None, budget: SearchBudget, rng):
    if i == 1:
        pts = ctx.boundary_centers
        cap = budget.max_boundary
    else:
        R = None if eps is None else 1.0 / eps
        pad = 4 if R is None else int(np.ceil(R / ctx.h)) + 1
        pts = ctx.exterior_candidates(R, pad)
        cap = budget.max_exterior
    if len(pts) > cap:
        pts = pts[np.sort(rng.choice(len(pts), cap, replace=False))]
    return pts


class _Search:
    """Frame tables and the per-witness certificate search for one class."""

    def __init__(self, ctx: BodyContext, class_id: str, k: int, eps, m: int, budget: SearchBudget):
        self.ctx = ctx
        self.n = n = ctx.body.n
        self.class_id = class_id
        self.k = k
        self.m = m
        self.R = None if eps is None else 1.0 / eps
        self.budget = budget
        self.i = 1 if class_id.endswith(("1", "1w")) else 2
        self.weak = class_id.endswith("w")
        self.obst = ctx.interior if self.i == 1 else ctx.solid
        self.status = Status.SUPPORTING if self.i == 1 else Status.DISJOINT
        rng = np.random.default_rng(budget.seed)
        count = budget.frame_count(n)
        dim = k + 1 if self.R is not None else k
        self.frame_dim = dim
        self.shared = search.random_frames(n, dim, count, rng) if dim < n else []
        self.rng = np.random.default_rng(budget.seed + 1)

    def _frames(self, x, dim, base=None):
        normal = self.ctx.outward_normal(x, exterior=self.i == 2)
        if base is not None and base.shape[0] > 0:
            return search.frames_containing(base, dim, self.budget.frame_count(self.n), self.rng)
        if dim == self.n:
            return [np.eye(self.n)]
        if self.R is None:
            head = search.axis_frames(self.n, dim) + search.tangent_frames(normal, dim, self.budget.tangent_frames)
        else:
            head = (search.frames_containing(normal[None, :], dim, self.budget.tangent_frames, self.rng)
                    + search.axis_frames(self.n, dim))
        return head + self.shared if dim == self.frame_dim else head + search.random_frames(
            self.n, dim, self.budget.frame_count(self.n), self.rng)

    def _object(self, x, found, kind):
        if kind == "HalfPlane":
            U, e, _ = found
            return SupportingObject("HalfPlane", HalfPlane(AffineSubspace(x, U), e), self.status)
        if kind == "Plane":
            U, _ = found
            return SupportingObject("Plane", AffineSubspace(x, U), self.status)
        F, u, _ = found
        ball = Ball(x + self.R * u, self.R, AffineSubspace(x + self.R * u, F))
        return SupportingObject("Ball", ball, self.status)

    def witness_plane(self, x):
        """Sampled plane Q^{k-m} through ``x`` in the required relation to the body."""
        q = self.k - self.m
        if q == 0:
            return np.zeros((0, self.n))
        found = _search_plane(x, self.obst, self._frames(x, q))
        return None if found is None else found[0]

    def run(self, x):
        """Certificate for witness ``x`` or a failure reason string."""
        base = None
        if self.m < self.k and not self.class_id.startswith("K"):
            base = self.witness_plane(x)
            if base is None:
                return None, "no witness plane"
            base = base if base.shape[0] else None
        if self.R is not None:
            if base is not None and self.class_id.startswith("V"):
                return self._run_veps(x, base)
            found = _search_ball(x, self.obst, self._frames(x, self.k + 1), self.R, self.budget)
            return (None, "no ball") if found is None else (self._object(x, found, "Ball"), None)
        if self.weak:
            found = _search_plane(x, self.obst, self._frames(x, self.k, base))
            return (None, "no plane") if found is None else (self._object(x, found, "Plane"), None)
        found = _search_halfplane(x, self.obst, self._frames(x, self.k, base), self.budget)
        return (None, "no half-plane") if found is None else (self._object(x, found, "HalfPlane"), None)

    def _run_veps(self, x, base):
        # sphere S^{k-m}(C, R) through x: a (k-m+1)-ball with x on its rim, then
        # a (k+1)-ball around the same center in a carrier containing it
        q = base.shape[0]
        G = _search_ball(x, self.obst, self._frames(x, q + 1), self.R, self.budget)
        if G is None:
            return None, "no witness sphere"
        Fg, u, _ = G
        C = x + self.R * u
        for F in search.frames_containing(orthonormal_rows(Fg), self.k + 1,
                                          self.budget.frame_count(self.n), self.rng):
            if _ball_clear(C, F, self.R, self.obst):
                return SupportingObject("Ball", Ball(C, self.R, AffineSubspace(C, F)), self.status), None
        return None, "no ball"


def orthonormal_rows(F):
    return np.linalg.qr(np.asarray(F).T)[0].T


def classify(b: GridBody, class_id: str, k: int, eps: float | None = None,
             budget: SearchBudget | None = None, m: int | None = None,
             witnesses=None, context: BodyContext | None = None) -> ClassVerdict:
    """Membership verdict for ``b`` in the class ``class_id`` with parameter ``k``.

    ``witnesses`` overrides the default witness enumeration with explicit points.
    """
    if class_id not in CLASS_IDS:
        raise ValidationError(f"unknown class {class_id!r}")
    budget = budget if budget is not None else SearchBudget()
    n = b.n
    is_eps = "eps" in class_id
    if is_eps:
        if eps is None or not eps > 0:
            raise ValidationError("eps-classes need eps > 0")
        if not 0 <= k < n:
            raise UnsupportedCombination(f"k={k} needs 0 <= k < n={n}")
    else:
        eps = None
        if not 0 < k < n:
            raise UnsupportedCombination(f"k={k} needs 0 < k < n={n}")
    m = k if m is None else int(m)
    if m > k or (m < 1 and k > 0):
        raise UnsupportedCombination(f"m={m} needs 0 < m <= k={k}")
    ctx = context if context is not None else BodyContext(b)
    srch = _Search(ctx, class_id, k, eps, m, budget)
    rng = np.random.default_rng(budget.seed)
    if witnesses is None:
        pts = _witnesses(ctx, srch.i, eps, budget, rng)
    else:
        pts = np.atleast_2d(np.asarray(witnesses, dtype=float))
    failures, certs = [], {}
    checked = 0
    for x in pts:
        checked += 1
        obj, reason = srch.run(x)
        if obj is None:
            failures.append((x.copy(), reason))
            if len(failures) >= budget.max_failures:
                break
        elif len(certs) < budget.max_certificates:
            certs[tuple(np.round(x, 12))] = obj
    verdict = MEMBER if not failures else NO_CERTIFICATE
    return ClassVerdict(class_id, k, eps, verdict, checked, failures, certs, budget, m)


def ray_vertex_check(b: GridBody, x, k: int, mode: str = "supporting", directions: int = 720,
                     frames: int = 256, seed: int = 0, context: BodyContext | None = None) -> bool:
    """Image-side test: some orthogonal projection along a k-plane maps ``x`` to
    the vertex of a ray supporting (or missing) the image of the body.

    The image of each cell is the set of projected centers; a ray misses it
    when no projected obstacle is within the cell tolerance.
    """
    ctx = context if context is not None else BodyContext(b)
    x = np.asarray(x, dtype=float)
    n = b.n
    obst = ctx.interior if mode == "supporting" else ctx.solid
    rng = np.random.default_rng(seed)
    normal = ctx.outward_normal(x, exterior=mode != "supporting")
    fams = (search.tangent_frames(normal, k, 16) + search.axis_frames(n, k)
            + search.random_frames(n, k, frames, rng))
    V = obst.centers - x
    for U in fams:
        W = complete_basis(U, n)
        img = V @ W.T  # projected obstacles relative to f(x)
        d = W.shape[0]
        if len(img) == 0:
            return True
        if d == 2:
            # exact: each obstacle blocks an arc of directions around its own
            r = np.hypot(img[:, 0], img[:, 1])
            half = np.where(r > obst.tol, np.arcsin(np.minimum(obst.tol / np.maximum(r, 1e-300), 1.0)),
                            np.pi)
            ok, _, _ = search.free_circle(np.arctan2(img[:, 1], img[:, 0])[None], half[None])
            if ok[0]:
                return True
            continue
        rays = search.sphere_points(d, 8 * directions, seed=seed)
        t = img @ rays.T  # (m, r) parameter of closest ray point
        dist2 = np.sum(img * img, axis=1)[:, None] - np.maximum(t, 0) ** 2
        if np.any(np.all(dist2 > obst.tol ** 2, axis=0)):
            return True
    return False


__all__ = [
    "CLASS_IDS", "MEMBER", "NO_CERTIFICATE", "Status", "Ball", "SupportingObject", "SearchBudget",
    "ClassVerdict", "BodyContext", "classify", "is_supporting", "revalidate", "sample_object",
    "ray_vertex_check",
]
