"""Projection maps onto planes and punctured planes, applied to points and bodies.

Images of bodies live on a chart lattice of the target plane: in-plane
coordinates relative to the plane's base point (the center for punctured
planes), cell ``i`` covering ``[i h, (i + 1) h)`` per axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import ndimage
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from . import formats
from .bodies import GridBody, boundary_mask
from .errors import (
    DegenerateFiber,
    EmptyFamily,
    NoFiberSolution,
    PunctureHit,
    TooManySkipped,
    ValidationError,
    WrongDimension,
)
from .geometry import AffineSubspace, PuncturedPlane, as_vector, complete_basis, orthonormalize

PUNCTURE_TOL = 1e-12
FIBER_TOL = 1e-9
SKIP_FRACTION = 1e-3


# -- point maps ----------------------------------------------------------------------------
def orthogonal_project_coords(plane: AffineSubspace, X) -> np.ndarray:
    """Chart coordinates of the orthogonal projection of the rows of ``X``."""
    return (np.atleast_2d(X) - plane.base) @ plane.basis.T


def circular_coords(pp: PuncturedPlane, X):
    """Chart coordinates of ``f_{P(C)}`` for the rows of ``X`` plus a validity mask.

    Rows on the complement plane ``P^⊥(C)`` (the map is undefined there) are
    flagged invalid and get zero coordinates.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    V = X - pp.center
    a = V @ pp.plane.basis.T
    r = np.linalg.norm(V, axis=1)
    na = np.linalg.norm(a, axis=1)
    ok = na > FIBER_TOL * np.maximum(1.0, r)
    scale = np.zeros_like(r)
    scale[ok] = r[ok] / na[ok]
    return a * scale[:, None], ok


def circular_project_point(pp: PuncturedPlane, x) -> np.ndarray:
    """Nearest point to ``x`` on the sphere slice ``S(C, |Cx|) ∩ P(C)``.

    In coordinates centered at ``C`` with unit normals ``w_j`` of the plane,
    ``f(x) = |x| (x - Σ (w_j, x) w_j) / sqrt(|x|^2 - Σ (w_j, x)^2)``.
    """
    x = as_vector(x, pp.n)
    v = x - pp.center
    r = float(np.linalg.norm(v))
    if r <= PUNCTURE_TOL:
        raise PunctureHit("x coincides with the puncture center")
    # x - sum (w_j, x) w_j equals the in-plane component; taking it from the
    # plane basis avoids cancellation when x is close to P^⊥(C)
    a = pp.plane.basis @ v
    denom = float(np.linalg.norm(a))
    if denom <= FIBER_TOL * max(1.0, r):
        raise DegenerateFiber("x lies on the complement plane of the puncture")
    return pp.center + (r / denom) * (a @ pp.plane.basis)


def positive_projection_point(C, x) -> float:
    return float(np.linalg.norm(as_vector(x) - as_vector(C)))


# -- profile functions -----------------------------------------------------------------------
@dataclass(frozen=True)
class ProfileFunction:
    """Profile ``g`` on ``[-a, b]`` of a hypersurface of revolution.

    ``g(0) = 1``, ``g'(0) = 0``, the region under the graph is convex and the
    curvature of the graph is at most 1; all checked numerically on creation.
    """

    g: Callable[[np.ndarray], np.ndarray]
    a: float = 1.0
    b: float = 1.0
    name: str = "custom"

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValidationError("profile domain bounds must be positive")
        g0 = float(self(0.0))
        if abs(g0 - 1) > 1e-6:
            raise ValidationError(f"profile needs g(0)=1, got {g0}")
        s = 1e-5
        if abs(float(self(s)) - float(self(-s))) / (2 * s) > 1e-6:
            raise ValidationError("profile needs g'(0)=0")
        t = np.linspace(-0.95 * min(self.a, 50.0), 0.95 * min(self.b, 50.0), 801)
        d = 1e-4
        gm, g0v, gp = self(t - d), self(t), self(t + d)
        g1 = (gp - gm) / (2 * d)
        g2 = (gp - 2 * g0v + gm) / (d * d)
        if np.any(g2 > 1e-6):
            raise ValidationError("profile graph must bound a convex region")
        kappa = np.abs(g2) / (1 + g1 * g1) ** 1.5
        if np.any(kappa > 1 + 1e-6 + 1e-4 * np.abs(g2)):
            raise ValidationError(f"profile curvature exceeds 1 (max {kappa.max():.4f})")

    def __call__(self, t):
        return np.asarray(self.g(np.asarray(t, dtype=float)), dtype=float)

    @classmethod
    def semicircle(cls) -> "ProfileFunction":
        return cls(lambda t: np.sqrt(np.maximum(1 - t * t, 0.0)), 1.0, 1.0, "semicircle")

    @classmethod
    def ellipse(cls, ratio: float = 2.0, limit: float | None = None) -> "ProfileFunction":
        """Half-ellipse with horizontal semi-axis ``ratio`` and height 1.

        The domain is cut where the curvature of the ellipse would exceed 1.
        """
        if ratio < 1:
            raise ValidationError("ellipse ratio must be >= 1 for the curvature bound")
        if limit is None:
            # curvature ratio / (ratio^2 sin^2 + cos^2)^{3/2} <= 1 for the point (ratio cos, sin)
            s2 = (ratio ** (2 / 3) - 1) / (ratio * ratio - 1) if ratio > 1 else 0.0
            limit = 0.99 * ratio * np.sqrt(1 - s2)
        return cls(lambda t: np.sqrt(np.maximum(1 - (t / ratio) ** 2, 0.0)), limit, limit, f"ellipse{ratio:g}")


def g_nonlinear_project_point(pp: PuncturedPlane, g: ProfileFunction, x, r_max: float | None = None) -> np.ndarray:
    """Nearest point of ``S(C, R(x)) ∩ P(C)`` where ``R(x)`` solves ``R g(y / R) = rho``.

    ``rho`` is the in-plane radius of ``x - C`` and ``y`` the complement
    component (signed when the complement is a line).  The smallest root in
    ``(0, r_max]`` is used, ``r_max`` defaulting to ``10 |x - C|``.
    """
    x = as_vector(x, pp.n)
    v = x - pp.center
    r = float(np.linalg.norm(v))
    if r <= PUNCTURE_TOL:
        raise PunctureHit("x coincides with the puncture center")
    a = pp.plane.basis @ v
    rho = float(np.linalg.norm(a))
    if rho <= FIBER_TOL:
        raise DegenerateFiber("x lies on the complement plane of the puncture")
    w = pp.complement.basis @ v
    y = float(w[0]) if len(w) == 1 else float(np.linalg.norm(w))
    if abs(y) <= 1e-15:
        return x.copy()
    bound = g.b if y > 0 else g.a
    lo = max(1e-6, abs(y) / bound)
    hi = 10 * r if r_max is None else float(r_max)
    if lo >= hi:
        raise NoFiberSolution("no admissible fiber radius")

    def phi(R):
        return R * float(g(y / R)) - rho

    grid = np.geomspace(lo, hi, 400)
    vals = np.array([phi(R) for R in grid])
    if abs(vals[0]) < 1e-14:
        R = grid[0]
    else:
        sign = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)
        if len(sign) == 0:
            raise NoFiberSolution(f"R g(y/R) = {rho:.6g} has no root in ({lo:.3g}, {hi:.3g}]")
        j = int(sign[0])
        R = brentq(phi, grid[j], grid[j + 1], xtol=1e-14, rtol=1e-15)
    return pp.center + (R / rho) * (a @ pp.plane.basis)


# -- body images ---------------------------------------------------------------------------
@dataclass
class ProjectionImage:
    """Occupied chart cells of a projected body."""

    target: object  # AffineSubspace or PuncturedPlane
    cells: np.ndarray  # (m, p) integer chart cells, sorted and unique
    spacing: float
    skipped: int = 0
    _lookup: object = field(default=None, repr=False, compare=False)

    @property
    def chart(self) -> AffineSubspace:
        return self.target.plane if isinstance(self.target, PuncturedPlane) else self.target

    @property
    def dim(self) -> int:
        return self.chart.dim

    def grid2d(self):
        """Dense occupancy over the bounding window of the cells and its index origin."""
        if len(self.cells) == 0:
            return np.zeros((1,) * max(self.dim, 1), bool), np.zeros(max(self.dim, 1), np.int64)
        lo = self.cells.min(axis=0)
        shape = tuple(self.cells.max(axis=0) - lo + 1)
        occ = np.zeros(shape, bool)
        occ[tuple((self.cells - lo).T)] = True
        return occ, lo

    def _dilated(self):
        if self._lookup is None:
            occ, lo = self.grid2d()
            occ = np.pad(occ, 1)
            dil = ndimage.binary_dilation(occ, structure=np.ones((3,) * occ.ndim, bool))
            self._lookup = (dil, lo - 1)
        return self._lookup

    def contains_coords(self, T, tol_cells: int = 1) -> np.ndarray:
        """Membership of chart points; ``tol_cells=1`` accepts neighbouring cells."""
        T = np.atleast_2d(T)
        idx = np.floor(T / self.spacing).astype(np.int64)
        if tol_cells == 0:
            occ, lo = self.grid2d()
            occ, lo = np.pad(occ, 1), lo - 1
        else:
            occ, lo = self._dilated()
        rel = idx - lo
        inside = np.all((rel >= 0) & (rel < np.array(occ.shape)), axis=1)
        out = np.zeros(len(T), bool)
        out[inside] = occ[tuple(rel[inside].T)]
        return out

    def same_cells(self, other: "ProjectionImage") -> bool:
        return self.cells.shape == other.cells.shape and bool(np.all(self.cells == other.cells))

    def subset_of(self, other: "ProjectionImage") -> bool:
        a = {tuple(c) for c in self.cells}
        return a <= {tuple(c) for c in other.cells}

    def save(self, path):
        occ, lo = self.grid2d()
        meta = {
            "kind": "image",
            "index_origin": " ".join(str(int(v)) for v in lo),
            "base": " ".join(repr(float(v)) for v in self.chart.base),
            "basis": " ".join(repr(float(v)) for v in self.chart.basis.ravel()),
            "punctured": str(isinstance(self.target, PuncturedPlane)),
            "skipped": str(self.skipped),
        }
        return formats.write_grid(path, occ, lo * self.spacing, self.spacing, meta)

    def save_pgm(self, path):
        occ, _ = self.grid2d()
        if occ.ndim == 1:
            occ = occ[:, None]
        if occ.ndim != 2:
            raise WrongDimension("PGM output needs a 1- or 2-dimensional image")
        return formats.write_pgm(path, occ)


def _cells(T: np.ndarray, h: float) -> np.ndarray:
    if len(T) == 0:
        return np.zeros((0, T.shape[1] if T.ndim == 2 else 1), np.int64)
    return np.unique(np.floor(T / h).astype(np.int64), axis=0)


def orthogonal_project_body(plane: AffineSubspace, b: GridBody) -> ProjectionImage:
    T = orthogonal_project_coords(plane, b.occupied_centers())
    return ProjectionImage(plane, _cells(T, b.h), b.h)


def circular_project_body(pp: PuncturedPlane, b: GridBody) -> ProjectionImage:
    """Image cells hit by at least one occupied cell center; centers on ``P^⊥(C)`` are skipped."""
    T, ok = circular_coords(pp, b.occupied_centers())
    return ProjectionImage(pp, _cells(T[ok], b.h), b.h, skipped=int(np.count_nonzero(~ok)))


# -- radial profiles -------------------------------------------------------------------------
@dataclass
class RadialProfile:
    """Occupied radius bins ``[i h, (i + 1) h)``; negative ``i`` only for signed profiles."""

    center: np.ndarray
    direction: np.ndarray | None
    offset: int
    bins: np.ndarray  # bool; entry j is bin offset + j
    spacing: float
    signed: bool
    skipped: int = 0

    @property
    def indices(self) -> np.ndarray:
        return self.offset + np.flatnonzero(self.bins)

    def folded(self) -> "RadialProfile":
        """Unsigned profile: radius bin ``i`` occupied iff signed bin ``i`` or ``-i-1`` is."""
        if not self.signed:
            return self
        idx = self.indices
        idx = np.where(idx < 0, -idx - 1, idx)
        return _profile_from_indices(self.center, None, idx, self.spacing, False, self.skipped)

    def same_bins(self, other: "RadialProfile") -> bool:
        a, b = self.indices, other.indices
        return a.shape == b.shape and bool(np.all(a == b))

    def to_text(self) -> str:
        lines = [
            f"signed {int(self.signed)}",
            f"spacing {self.spacing!r}",
            "center " + " ".join(repr(float(c)) for c in self.center),
        ]
        if self.direction is not None:
            lines.append("direction " + " ".join(repr(float(c)) for c in self.direction))
        lines.append("bins " + " ".join(str(int(i)) for i in self.indices))
        return "\n".join(lines) + "\n"


def _profile_from_indices(center, direction, idx, h, signed, skipped=0) -> RadialProfile:
    idx = np.unique(np.asarray(idx, dtype=np.int64))
    if len(idx) == 0:
        return RadialProfile(center, direction, 0, np.zeros(0, bool), h, signed, skipped)
    off = int(idx[0])
    bins = np.zeros(int(idx[-1]) - off + 1, bool)
    bins[idx - off] = True
    return RadialProfile(center, direction, off, bins, h, signed, skipped)


def positive_circular_projection(C, b: GridBody) -> RadialProfile:
    """Unsigned profile of ``|Cx|`` over the occupied cell centers."""
    C = as_vector(C, b.n)
    r = np.linalg.norm(b.occupied_centers() - C, axis=1)
    return _profile_from_indices(C, None, np.floor(r / b.h), b.h, False)


def signed_line_projection(pp: PuncturedPlane, b: GridBody) -> RadialProfile:
    """Signed radii ``sign<x - C, dir> |x - C|`` for a punctured line ``P^1(C)``."""
    if pp.plane.dim != 1:
        raise WrongDimension("signed profiles need a punctured line")
    d = pp.plane.basis[0]
    V = b.occupied_centers() - pp.center
    s = V @ d
    r = np.linalg.norm(V, axis=1)
    ok = np.abs(s) > FIBER_TOL * np.maximum(r, 1.0)
    sr = np.sign(s[ok]) * r[ok]
    return _profile_from_indices(pp.center, d, np.floor(sr / b.h), b.h, True, int(np.count_nonzero(~ok)))


def signed_radius(pp: PuncturedPlane, X):
    """Signed radius of rows of ``X`` for a punctured line and a validity mask."""
    d = pp.plane.basis[0]
    V = np.atleast_2d(X) - pp.center
    s = V @ d
    r = np.linalg.norm(V, axis=1)
    ok = np.abs(s) > FIBER_TOL * np.maximum(r, 1.0)
    return np.sign(s) * r, ok


# -- projection maps and families --------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class ProjectionMap:
    """One member of a family: orthogonal onto ``target`` or circular onto a punctured plane."""

    target: object
    circular: bool

    def coords(self, X):
        if self.circular:
            return circular_coords(self.target, X)
        T = orthogonal_project_coords(self.target, X)
        return T, np.ones(len(T), bool)

    def image(self, b: GridBody) -> ProjectionImage:
        if self.circular:
            return circular_project_body(self.target, b)
        return orthogonal_project_body(self.target, b)

    @property
    def center(self):
        return self.target.center if self.circular else None

    def describe(self) -> str:
        plane = self.target.plane if self.circular else self.target
        base = " ".join(f"{v:.6f}" for v in plane.base)
        basis = " ".join(f"{v:.6f}" for v in plane.basis.ravel())
        return f"{'circular' if self.circular else 'orthogonal'} base {base} basis {basis}"


@dataclass
class ProjectionFamily:
    """Enumerable family of projections.

    ``kind`` is one of ``AllOrthogonal``, ``CircularCentersOnSet``,
    ``CircularEps``, ``CircularAxis``.  Enumeration takes members from a
    seeded stream, so the first ``N`` members do not depend on larger ``N``.
    """

    kind: str
    k: int
    n: int
    count: int
    seed: int = 0
    centers: np.ndarray | None = None  # CircularCentersOnSet
    body: GridBody | None = None  # CircularEps
    eps: float | None = None  # CircularEps
    axis: AffineSubspace | None = None  # CircularAxis
    span: tuple = (-1.0, 1.0)  # CircularAxis: coordinate range along the axis
    max_attempts: int = 400

    KINDS = ("AllOrthogonal", "CircularCentersOnSet", "CircularEps", "CircularAxis")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValidationError(f"unknown family kind {self.kind!r}")
        if not 0 < self.k < self.n:
            raise ValidationError(f"need 0 < k < n, got k={self.k}, n={self.n}")
        if self.count < 1:
            raise ValidationError("family size must be positive")
        if self.kind == "CircularCentersOnSet" and (self.centers is None or len(np.atleast_2d(self.centers)) == 0):
            raise ValidationError("CircularCentersOnSet needs a nonempty center set")
        if self.kind == "CircularEps" and (self.body is None or not (self.eps and self.eps > 0)):
            raise ValidationError("CircularEps needs a body and eps > 0")
        if self.kind == "CircularAxis" and (self.axis is None or self.axis.dim != self.k):
            raise ValidationError("CircularAxis needs a k-dimensional axis")

    @property
    def circular(self) -> bool:
        return self.kind != "AllOrthogonal"


def _orientation_stream(rng, n: int, dim: int, i: int):
    """Plane directions (rows) of dimension ``dim``; golden-angle lines in the plane."""
    if n == 2 and dim == 1:
        t = np.pi * ((0.5 + i * 0.6180339887498949) % 1.0)
        return np.array([[np.cos(t), np.sin(t)]])
    g = rng.standard_normal((dim, n))
    return orthonormalize(g)


def enumerate_family(fam: ProjectionFamily) -> list[ProjectionMap]:
    rng = np.random.default_rng(fam.seed)
    n, k, p = fam.n, fam.k, fam.n - fam.k
    out: list[ProjectionMap] = []
    if fam.kind == "AllOrthogonal":
        for i in range(fam.count):
            basis = _orientation_stream(rng, n, p, i)
            out.append(ProjectionMap(AffineSubspace(np.zeros(n), basis), False))
        return out
    if fam.kind == "CircularCentersOnSet":
        M = np.atleast_2d(np.asarray(fam.centers, dtype=float))
        for i in range(fam.count):
            C = M[i % len(M)]
            basis = _orientation_stream(rng, n, p, i)
            out.append(ProjectionMap(PuncturedPlane.through(C, basis), True))
        return out
    if fam.kind == "CircularAxis":
        L = fam.axis
        normal = complete_basis(L.basis, n)
        lo, hi = fam.span
        for i in range(fam.count):
            if fam.count == 1:
                t = np.full(k, 0.5 * (lo + hi))
            elif k == 1:
                t = np.array([lo + (hi - lo) * i / (fam.count - 1)])
            else:
                t = rng.uniform(lo, hi, size=k)
            C = L.from_coords(t)
            out.append(ProjectionMap(PuncturedPlane.through(C, normal), True))
        return out
    return _enumerate_eps(fam, rng)


def _enumerate_eps(fam: ProjectionFamily, rng) -> list[ProjectionMap]:
    """Centers within ``1/eps`` of the body whose complement plane misses it."""
    b = fam.body
    n, k, p = fam.n, fam.k, fam.n - fam.k
    R = 1.0 / fam.eps
    occ = b.occupied_centers()
    tree = cKDTree(occ)
    bd = b.centers(np.argwhere(boundary_mask(b)))
    clearance = b.h  # complement plane must stay this far from every cell center
    out: list[ProjectionMap] = []
    attempts = 0
    limit = fam.max_attempts * fam.count
    while len(out) < fam.count and attempts < limit:
        attempts += 1
        p0 = bd[rng.integers(len(bd))]
        u = rng.standard_normal(n)
        u /= np.linalg.norm(u)
        C = p0 + rng.uniform(0, R) * u
        dC, _ = tree.query(C)
        if dC > R or dC <= clearance:
            continue
        comp = orthonormalize(rng.standard_normal((k, n)))
        # distance of every cell center to the complement plane C + span(comp)
        V = occ - C
        off = V - (V @ comp.T) @ comp
        if np.min(np.einsum("ij,ij->i", off, off)) <= clearance * clearance:
            continue
        basis = complete_basis(comp, n)
        out.append(ProjectionMap(PuncturedPlane.through(C, basis), True))
    if not out:
        raise EmptyFamily(f"no admissible center within 1/eps={R:g} after {attempts} attempts")
    return out


def check_skipped(image: ProjectionImage, b: GridBody, strict: bool):
    """Raise when a map undefined on too many body cells would corrupt a hull."""
    if strict and image.skipped > SKIP_FRACTION * max(b.count, 1):
        raise TooManySkipped(f"{image.skipped} of {b.count} cells lie on the complement plane")


__all__ = [
    "circular_project_point",
    "circular_coords",
    "orthogonal_project_coords",
    "positive_projection_point",
    "ProfileFunction",
    "g_nonlinear_project_point",
    "ProjectionImage",
    "orthogonal_project_body",
    "circular_project_body",
    "RadialProfile",
    "positive_circular_projection",
    "signed_line_projection",
    "signed_radius",
    "ProjectionMap",
    "ProjectionFamily",
    "enumerate_family",
    "check_skipped",
]
