"""Affine subspaces and the point-level maps built on them.

Everything is floating point with explicit tolerances.  Points are numpy
arrays of shape ``(n,)``; most maps also accept stacks of shape ``(m, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFiber, DimensionMismatch, RankDeficient, ValidationError

LINALG_TOL = 1e-9
SUPPORTED_DIMS = (2, 3, 4)


def as_vector(x, n: int | None = None) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a 1-D coordinate array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValidationError("coordinates must be finite")
    if n is not None and v.shape[0] != n:
        raise DimensionMismatch(f"expected dimension {n}, got {v.shape[0]}")
    return v


def orthonormalize(vs, tol: float = 1e-10) -> np.ndarray:
    """Gram-Schmidt (two passes) over the rows of ``vs``.

    Returns a ``(d, n)`` array with orthonormal rows spanning the same
    subspace.  Raises :class:`RankDeficient` for dependent input.
    """
    a = np.atleast_2d(np.asarray(vs, dtype=float))
    if a.size == 0:
        return a.reshape(0, a.shape[-1] if a.ndim == 2 else 0)
    scale = max(1.0, float(np.max(np.abs(a))))
    out: list[np.ndarray] = []
    for v in a:
        w = v.copy()
        for _ in range(2):
            for e in out:
                w -= (w @ e) * e
        norm = np.linalg.norm(w)
        if norm <= tol * scale:
            raise RankDeficient("input vectors are linearly dependent")
        out.append(w / norm)
    return np.array(out)


def complete_basis(basis: np.ndarray, n: int) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ``span(basis)``."""
    basis = np.asarray(basis, dtype=float).reshape(-1, n)
    d = basis.shape[0]
    if d == n:
        return np.zeros((0, n))
    if d == 0:
        return np.eye(n)
    q, _ = np.linalg.qr(np.hstack([basis.T, np.eye(n)]))
    comp = q[:, d:n].T
    # QR may return columns with flipped sign; make them deterministic
    for i, row in enumerate(comp):
        j = int(np.argmax(np.abs(row)))
        if row[j] < 0:
            comp[i] = -row
    return comp


def random_frame(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    """Seeded Gaussian frame of ``d`` orthonormal vectors in R^n."""
    while True:
        g = rng.standard_normal((d, n))
        try:
            return orthonormalize(g)
        except RankDeficient:  # pragma: no cover - measure zero
            continue


@dataclass(frozen=True, eq=False)
class AffineSubspace:
    """``base + span(basis)`` with an orthonormal ``basis`` of shape (d, n)."""

    base: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        base = as_vector(self.base)
        n = base.shape[0]
        basis = np.asarray(self.basis, dtype=float).reshape(-1, n)
        if basis.shape[0] > n:
            raise DimensionMismatch("more basis vectors than ambient dimension")
        gram = basis @ basis.T
        if not np.allclose(gram, np.eye(basis.shape[0]), atol=1e-12, rtol=0):
            raise ValidationError("basis must be orthonormal")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "basis", basis)
        base.flags.writeable = False
        basis.flags.writeable = False

    @classmethod
    def spanned(cls, base, directions) -> "AffineSubspace":
        base = as_vector(base)
        dirs = np.asarray(directions, dtype=float).reshape(-1, base.shape[0])
        return cls(base, orthonormalize(dirs) if len(dirs) else dirs)

    @classmethod
    def point(cls, p) -> "AffineSubspace":
        p = as_vector(p)
        return cls(p, np.zeros((0, p.shape[0])))

    @property
    def n(self) -> int:
        return self.base.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def coords(self, x) -> np.ndarray:
        """Chart coordinates of the orthogonal projection of ``x``."""
        x = np.asarray(x, dtype=float)
        self._check(x)
        return (x - self.base) @ self.basis.T

    def from_coords(self, t) -> np.ndarray:
        return self.base + np.asarray(t, dtype=float) @ self.basis

    def project(self, x) -> np.ndarray:
        return self.from_coords(self.coords(x))

    def distance(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.linalg.norm(x - self.project(x), axis=-1)

    def contains(self, x, tol: float = LINALG_TOL) -> np.ndarray:
        return self.distance(x) <= tol

    def complement(self, through=None) -> "AffineSubspace":
        """Orthogonal complement plane through ``through`` (default: base)."""
        base = self.base if through is None else as_vector(through, self.n)
        return AffineSubspace(base, complete_basis(self.basis, self.n))

    def _check(self, x):
        if x.shape[-1] != self.n:
            raise DimensionMismatch(f"point dimension {x.shape[-1]} != subspace ambient dimension {self.n}")


@dataclass(frozen=True, eq=False)
class PuncturedPlane:
    """An (n-k)-plane with a marked center lying on it."""

    plane: AffineSubspace
    center: np.ndarray

    def __post_init__(self):
        c = as_vector(self.center, self.plane.n)
        if self.plane.distance(c) > 1e-10:
            raise ValidationError("center must lie in the plane")
        object.__setattr__(self, "center", c)
        # re-anchor the chart at the center
        object.__setattr__(self, "plane", AffineSubspace(c, self.plane.basis))

    @classmethod
    def through(cls, center, directions) -> "PuncturedPlane":
        return cls(AffineSubspace.spanned(center, directions), center)

    @property
    def n(self) -> int:
        return self.plane.n

    @property
    def k(self) -> int:
        """Codimension of the plane (the fiber dimension)."""
        return self.n - self.plane.dim

    @property
    def complement(self) -> AffineSubspace:
        return self.plane.complement(self.center)

    def split(self, x):
        """Return (in-plane coords, complement coords) of ``x - center``."""
        x = np.asarray(x, dtype=float)
        v = x - self.center
        return v @ self.plane.basis.T, v @ self.complement.basis.T


@dataclass(frozen=True, eq=False)
class HalfPlane:
    """Closed half-plane bounded by a k-plane, opening along ``direction``.

    ``radius`` truncates to the points within that distance of the boundary;
    the default is unbounded.
    """

    boundary: AffineSubspace
    direction: np.ndarray
    radius: float = field(default=np.inf)

    def __post_init__(self):
        d = as_vector(self.direction, self.boundary.n)
        d = d / np.linalg.norm(d)
        if self.boundary.dim and np.max(np.abs(self.boundary.basis @ d)) > 1e-12:
            raise ValidationError("direction must be orthogonal to the boundary plane")
        if not self.radius > 0:
            raise ValidationError("radius must be positive")
        object.__setattr__(self, "direction", d)

    @property
    def carrier(self) -> AffineSubspace:
        return AffineSubspace(self.boundary.base, np.vstack([self.boundary.basis, self.direction]))

    def decompose(self, x):
        """(boundary coords, direction coefficient, residual norm) of ``x``."""
        v = np.asarray(x, dtype=float) - self.boundary.base
        t = v @ self.boundary.basis.T
        s = v @ self.direction
        res = v - t @ self.boundary.basis - np.multiply.outer(s, self.direction)
        return t, s, np.linalg.norm(res, axis=-1)

    def contains(self, x, tol: float = LINALG_TOL):
        _, s, res = self.decompose(x)
        return (res <= tol) & (s >= -tol) & (s <= self.radius + tol)


@dataclass(frozen=True, eq=False)
class SolidCylinder:
    axis: AffineSubspace
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValidationError("radius must be positive")

    def contains(self, x, tol: float = 0.0):
        return self.axis.distance(x) <= self.radius + tol


@dataclass(frozen=True, eq=False)
class SphereSlice:
    """``S(center, radius)`` intersected with a carrier plane through the center."""

    center: np.ndarray
    radius: float
    carrier: AffineSubspace

    def __post_init__(self):
        c = as_vector(self.center, self.carrier.n)
        if self.carrier.distance(c) > 1e-10:
            raise ValidationError("carrier must pass through the center")
        if not self.radius > 0:
            raise ValidationError("radius must be positive")
        object.__setattr__(self, "center", c)

    @property
    def dim(self) -> int:
        return self.carrier.dim - 1

    def sample(self, m: int, rng: np.random.Generator | None = None) -> np.ndarray:
        """About ``m`` points on the slice (exact grid for circles)."""
        d = self.carrier.dim
        if d == 1:
            t = np.array([[1.0], [-1.0]])
        elif d == 2:
            a = np.linspace(0, 2 * np.pi, m, endpoint=False)
            t = np.stack([np.cos(a), np.sin(a)], axis=1)
        else:
            rng = rng if rng is not None else np.random.default_rng(0)
            g = rng.standard_normal((m, d))
            t = g / np.linalg.norm(g, axis=1, keepdims=True)
        return self.center + self.radius * (t @ self.carrier.basis)


def orthogonal_project_point(x, plane: AffineSubspace) -> np.ndarray:
    return plane.project(x)


def distance_to_subspace(x, plane: AffineSubspace):
    return plane.distance(x)


def halfplane_contains(h: HalfPlane, x, tol: float = LINALG_TOL):
    if tol < 0:
        raise ValidationError("tol must be nonnegative")
    return h.contains(x, tol)


def meridian_distance(pp: PuncturedPlane, x, y, tol: float = LINALG_TOL):
    """Distance from ``y`` to the fiber of the circular projection through ``x``.

    The fiber is the closed k-hemisphere on ``S(C, |Cx|)`` spanned by the
    in-plane direction of ``x`` and the complement directions; it contains
    ``x`` and meets the plane exactly at the image of ``x``.
    """
    x = as_vector(x, pp.n)
    px, _ = pp.split(x)
    rho = np.linalg.norm(px)
    if rho <= tol:
        raise DegenerateFiber("x lies in the orthogonal complement of the punctured plane")
    r = float(np.linalg.norm(x - pp.center))
    u = px / rho
    py, qy = pp.split(y)
    alpha = py @ u
    off = np.linalg.norm(py - np.multiply.outer(alpha, u), axis=-1)
    qn = np.linalg.norm(qy, axis=-1)
    yn = np.hypot(alpha, qn)
    # alpha >= 0: radial distance to the sphere; otherwise nearest rim point
    d_front = np.abs(yn - r)
    d_back = np.hypot(alpha, qn - r)
    d = np.where(alpha >= 0, d_front, d_back)
    return np.hypot(off, d)
