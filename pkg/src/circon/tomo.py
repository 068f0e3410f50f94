"""Reconstruction and registration procedures built on the projection maps.

* carving from signed punctured-line profiles
* registration of orthogonal projections under translations/homotheties
* recovery of a rotation about an (n-2)-plane from circular projections
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.spatial import cKDTree

from .bodies import GridBody, boundary_mask, coincide, symmetric_difference_volume
from .errors import (
    DegenerateProjection,
    EmptyProfiles,
    SurroundsAxis,
    UnsupportedGroup,
    ValidationError,
    WrongDimension,
)
from .geometry import AffineSubspace, PuncturedPlane, as_vector, complete_basis
from .projections import (
    ProjectionFamily,
    circular_coords,
    enumerate_family,
    orthogonal_project_body,
    signed_line_projection,
    signed_radius,
)

GROUPS = ("trivial", "translation", "homothety")


# -- carving ---------------------------------------------------------------------------------
@dataclass
class ReconstructionReport:
    reconstructed: GridBody
    source_projection_count: int
    match: bool
    residual_volume: float

    def to_text(self) -> str:
        return (f"profiles {self.source_projection_count}\n"
                f"match {int(self.match)}\n"
                f"residual_volume {self.residual_volume!r}\n"
                f"cells {self.reconstructed.count}\n")


def supporting_centers(b: GridBody, eps: float, count: int, seed: int = 0, max_draws: int = 5_000_000):
    """Centers ``C`` with ``dist(C, b)`` within ``h`` of ``1/eps``, by rejection from the dilated box."""
    R = 1.0 / eps
    rng = np.random.default_rng(seed)
    tree = cKDTree(b.centers(np.argwhere(boundary_mask(b))))
    lo, hi = b.lo - R - 2 * b.h, b.hi + R + 2 * b.h
    out = []
    drawn = 0
    while len(out) < count and drawn < max_draws:
        X = rng.uniform(lo, hi, size=(8192, b.n))
        drawn += len(X)
        d, _ = tree.query(X)
        inside = b.contains(X)
        ok = (np.abs(d - R) <= b.h) & ~inside
        out.extend(X[ok])
    if len(out) < count:
        raise DegenerateProjection(f"only {len(out)} supporting centers found")
    return np.array(out[:count])


def toward_body(b: GridBody, centers) -> np.ndarray:
    """Unit directions from each center to its nearest occupied cell."""
    tree = cKDTree(b.occupied_centers())
    _, j = tree.query(centers)
    d = b.occupied_centers()[j] - centers
    return d / np.linalg.norm(d, axis=1, keepdims=True)


def line_profiles(b: GridBody, centers, directions):
    """Signed punctured-line profiles of ``b`` for paired centers and line directions."""
    out = []
    for C, d in zip(np.atleast_2d(centers), np.atleast_2d(directions)):
        pp = PuncturedPlane.through(C, d[None, :])
        out.append((pp, signed_line_projection(pp, b)))
    return out


def carve_reconstruct(profiles, domain: GridBody, truth: GridBody | None = None,
                      unsigned: bool = False) -> ReconstructionReport:
    """Keep the domain cells whose signed radius falls in an occupied bin of every profile.

    ``profiles`` is a list of ``(punctured line, RadialProfile)``; with
    ``unsigned`` the folded profiles are used against ``|Cx|``.
    """
    if not profiles:
        raise EmptyProfiles("no profiles to carve from")
    h = profiles[0][1].spacing
    if any(abs(p.spacing - h) > 1e-12 for _, p in profiles):
        raise ValidationError("profiles use different bin widths")
    if abs(domain.h - h) > 1e-12:
        raise ValidationError("domain and profiles use different spacings")
    X = domain.all_centers()
    keep = np.ones(len(X), bool)
    for pp, prof in profiles:
        idx_all = np.flatnonzero(keep)
        Y = X[idx_all]
        if unsigned:
            s = np.linalg.norm(Y - pp.center, axis=1)
            ok = np.ones(len(Y), bool)
            prof = prof.folded()
        else:
            s, ok = signed_radius(pp, Y)
        b = np.floor(s / h).astype(np.int64) - prof.offset
        inside = (b >= 0) & (b < len(prof.bins))
        hit = np.zeros(len(Y), bool)
        hit[inside] = prof.bins[b[inside]]
        keep[idx_all] = hit | ~ok
    rec = domain.with_occupancy(keep.reshape(domain.shape), allow_empty=True)
    if truth is None:
        return ReconstructionReport(rec, len(profiles), False, float("nan"))
    res = symmetric_difference_volume(rec, truth)
    return ReconstructionReport(rec, len(profiles), coincide(rec, truth), res)


# -- group registration ------------------------------------------------------------------------
@dataclass
class RegistrationResult:
    group: str
    parameter: object
    per_member_residuals: list
    consistent: bool
    ambiguous: bool = False
    ambient_residual: float | None = None
    outside_lemma: bool = False
    notes: list = field(default_factory=list)

    def to_text(self) -> str:
        par = np.atleast_1d(np.asarray(self.parameter, dtype=float))
        lines = [
            f"group {self.group}",
            "parameter " + " ".join(repr(float(v)) for v in par),
            f"consistent {int(self.consistent)}",
            f"ambiguous {int(self.ambiguous)}",
            f"outside_lemma {int(self.outside_lemma)}",
            f"ambient_residual {'-' if self.ambient_residual is None else repr(float(self.ambient_residual))}",
        ]
        lines += [f"member {i} {r!r}" for i, r in enumerate(self.per_member_residuals)]
        lines += [f"note {n}" for n in self.notes]
        return "\n".join(lines) + "\n"


def _cell_set_mismatch(A: np.ndarray, B: np.ndarray, tol_cells: int) -> int:
    """Cells of either set with no cell of the other within ``tol_cells`` (Chebyshev)."""
    if len(A) == 0 or len(B) == 0:
        return len(A) + len(B)
    ta, tb = cKDTree(A), cKDTree(B)
    da, _ = tb.query(A, p=np.inf)
    db, _ = ta.query(B, p=np.inf)
    return int(np.count_nonzero(da > tol_cells + 1e-9) + np.count_nonzero(db > tol_cells + 1e-9))


def _register_image(c1: np.ndarray, c2: np.ndarray, h: float, group: str, tol_cells: int):
    """Map the cell set ``c1`` onto ``c2`` under ``group``; returns (params, residual measure)."""
    p = c1.shape[1]
    X1 = (c1 + 0.5) * h
    X2 = (c2 + 0.5) * h
    m1, m2 = X1.mean(axis=0), X2.mean(axis=0)
    if group == "trivial":
        shift, scale = np.zeros(p), 1.0
    elif group == "translation":
        shift, scale = m2 - m1, 1.0
    else:
        scale = (len(c2) / len(c1)) ** (1.0 / p)
        shift = m2 - scale * m1
    Y = scale * X1 + shift
    moved = np.unique(np.floor(Y / h).astype(np.int64), axis=0)
    if scale > 1:
        # a dilated cell set is sparse; fill it by also moving sub-cell samples
        offs = (np.stack(np.meshgrid(*[np.linspace(-0.5, 0.5, 3)] * p, indexing="ij"), -1).reshape(-1, p)) * h
        Y = (scale * (X1[:, None, :] + offs[None]) + shift).reshape(-1, p)
        moved = np.unique(np.floor(Y / h).astype(np.int64), axis=0)
    residual = _cell_set_mismatch(moved, c2, tol_cells) * h ** p
    return (shift, scale), residual


def check_group_equivalence(b1: GridBody, b2: GridBody, fam: ProjectionFamily, group: str,
                            tol_cells: int = 1, residual_tol: float = 0.0) -> RegistrationResult:
    """Register ``f(b1)`` to ``f(b2)`` for each orthogonal member ``f`` under ``group``."""
    if group not in GROUPS:
        raise UnsupportedGroup(f"group {group!r} is not one of {GROUPS}")
    if fam.kind != "AllOrthogonal":
        raise ValidationError("group equivalence uses orthogonal projections")
    if b1.n != b2.n or fam.n != b1.n:
        raise ValidationError("dimension mismatch")
    members = enumerate_family(fam)
    residuals, rows, rhs, scales = [], [], [], []
    for f in members:
        i1, i2 = orthogonal_project_body(f.target, b1), orthogonal_project_body(f.target, b2)
        if len(i1.cells) == 0 or len(i2.cells) == 0:
            raise DegenerateProjection("empty projection")
        (shift, scale), res = _register_image(i1.cells, i2.cells, b1.h, group, tol_cells)
        residuals.append(float(res))
        rows.append(f.target.basis)
        rhs.append(shift)
        scales.append(scale)
    h = b1.h
    outside = (fam.n - fam.k) == 1
    notes = ["line projections: outside the regime of the lemma"] if outside else []
    member_ok = max(residuals) <= residual_tol + 1e-12
    if group == "trivial":
        param = np.zeros(b1.n)
        agree = True
    elif group == "translation":
        A, y = np.vstack(rows), np.concatenate(rhs)
        param, *_ = np.linalg.lstsq(A, y, rcond=None)
        agree = bool(np.max(np.abs(A @ param - y)) <= 2 * h)
    else:
        # the ambient homothety x -> s x + t projects to the same s on every member
        s = float(np.median(scales))
        A, y = np.vstack(rows), np.concatenate(rhs)
        t, *_ = np.linalg.lstsq(A, y, rcond=None)
        param = np.concatenate([[s], t])
        agree = bool(np.ptp(scales) <= 2 * h / max(1e-12, np.ptp(b1.occupied_centers(), axis=0).max())
                     and np.max(np.abs(A @ t - y)) <= 2 * h)
    consistent = member_ok and agree
    ambient = _ambient_residual(b1, b2, group)
    return RegistrationResult(group, param, residuals, consistent, False, ambient, outside, notes)


def _ambient_residual(b1: GridBody, b2: GridBody, group: str) -> float:
    """Relative symmetric difference after registering ``b1`` to ``b2`` in the ambient space.

    Uses the same estimator as for the images and no cell tolerance,
    normalised by the cell count of ``b2``.
    """
    A = b1.occupied_indices() + b1.index_origin
    B = b2.occupied_indices() + b2.index_origin
    h = b1.h
    (shift, scale), _ = _register_image(A, B, h, group, 0)
    Y = scale * (A + 0.5) * h + shift
    moved = np.unique(np.floor(Y / h).astype(np.int64), axis=0)
    sa = {tuple(r) for r in moved}
    sb = {tuple(r) for r in B}
    return len(sa ^ sb) / max(len(sb), 1)


# -- rotations about an (n-2)-plane --------------------------------------------------------------
def _plane_frame(L: AffineSubspace):
    n = L.n
    if L.dim != n - 2:
        raise WrongDimension("the axis must have dimension n-2")
    return complete_basis(L.basis, n)


def surrounds_plane(b: GridBody, P: AffineSubspace, n_dir: int = 720) -> bool:
    """Every sampled half-hyperplane bounded by ``P`` meets a cell of ``b``."""
    W = _plane_frame(P)
    V = b.occupied_centers() - P.base
    w = V @ W.T
    r = np.linalg.norm(w, axis=1)
    tol = 0.5 * b.h * np.sqrt(b.n)
    if np.any(r <= tol):
        return True
    ang = np.arctan2(w[:, 1], w[:, 0])
    half = np.arcsin(np.minimum(1.0, tol / r))
    theta = 2 * np.pi * np.arange(n_dir) / n_dir
    covered = np.zeros(n_dir, bool)
    for s in range(0, len(ang), 4096):
        diff = np.angle(np.exp(1j * (theta[None, :] - ang[s:s + 4096, None])))
        covered |= np.any(np.abs(diff) <= half[s:s + 4096, None], axis=0)
        if covered.all():
            return True
    return bool(covered.all())


def _image_points(b: GridBody, pp: PuncturedPlane):
    T, ok = circular_coords(pp, b.occupied_centers())
    return T[ok]


def _rot2(phi):
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def _cells_of(T, h):
    return np.unique(np.floor(T / h).astype(np.int64), axis=0)


def _symdiff_count(T1, cells2_set, h, phi) -> int:
    moved = _cells_of(T1 @ _rot2(phi).T, h)
    a = {tuple(c) for c in moved}
    return len(a ^ cells2_set)


def recover_rotation(b1: GridBody, b2: GridBody, L: AffineSubspace, n_centers: int = 8,
                     n_angles: int = 720, span=None, check_surrounding: bool = True) -> RegistrationResult:
    """Angle of the rotation about ``L`` taking ``b1`` to ``b2``, from circular projections.

    Bodies that surround ``L`` raise :class:`SurroundsAxis` unless their
    images are rotationally symmetric, which is reported as ``ambiguous``.

    For each center ``C`` on ``L`` both bodies are projected onto the plane
    ``P(C)`` orthogonal to ``L``; the in-plane rotation minimising the
    symmetric difference of the image cells is found by an exhaustive sweep
    and refined by a bounded scalar search.
    """
    W = _plane_frame(L)
    surrounding = check_surrounding and any(surrounds_plane(b, L) for b in (b1, b2))
    for b in (b1, b2):
        if np.any(L.distance(b.occupied_centers()) <= 0.5 * b.h * np.sqrt(b.n)):
            raise ValidationError("bodies must be disjoint from the axis")
    h = b1.h
    if span is None:
        c = np.vstack([b1.occupied_centers(), b2.occupied_centers()]) - L.base
        t = c @ L.basis.T
        span = (t.min(axis=0), t.max(axis=0))
    lo, hi = (np.atleast_1d(np.asarray(s, dtype=float)) for s in span)
    k = L.dim
    if k == 1:
        grid = lo + (hi - lo) * ((np.arange(n_centers) + 0.5) / n_centers)[:, None]
    else:
        grid = np.random.default_rng(0).uniform(lo, hi, size=(n_centers, k))
    cand = 2 * np.pi * np.arange(n_angles) / n_angles
    step = 2 * np.pi / n_angles
    angles, residuals, ambiguous = [], [], False
    for tcoord in grid:
        C = L.from_coords(tcoord)
        pp = PuncturedPlane.through(C, W)
        T1, T2 = _image_points(b1, pp), _image_points(b2, pp)
        if len(T1) == 0 or len(T2) == 0:
            raise DegenerateProjection("empty circular projection")
        s2 = {tuple(c) for c in _cells_of(T2, h)}
        obj = np.array([_symdiff_count(T1, s2, h, p) for p in cand])
        j = int(np.argmin(obj))
        res = minimize_scalar(lambda p: _symdiff_count(T1, s2, h, p), method="bounded",
                              bounds=(cand[j] - step, cand[j] + step), options={"xatol": 1e-4})
        best, val = (res.x, res.fun) if res.fun <= obj[j] else (cand[j], obj[j])
        angles.append(best % (2 * np.pi))
        residuals.append(float(val))
        ambiguous |= _is_ambiguous(obj, j, len(s2))
    angles = np.array(angles)
    mean = float(np.angle(np.mean(np.exp(1j * angles))) % (2 * np.pi))
    spread = float(np.max(np.abs(np.angle(np.exp(1j * (angles - mean))))))
    tol = max(np.radians(2.0), step)
    consistent = spread <= tol and not ambiguous
    notes = [f"spread_deg {np.degrees(spread):.4f}"]
    if surrounding:
        # a symmetric image is the more specific diagnosis; otherwise the
        # surrounding case is outside the regime where the angle is meaningful
        if not ambiguous:
            raise SurroundsAxis("body surrounds the rotation axis")
        notes.append("surrounds the axis")
        consistent = False
    return RegistrationResult("rotation_about_axis", mean, residuals, consistent, ambiguous, None, False, notes)


def _is_ambiguous(obj: np.ndarray, j: int, size: int) -> bool:
    """Flat objective, or a second well-separated minimum within 5% of the range."""
    lo, hi = float(obj.min()), float(obj.max())
    if hi - lo <= 0.05 * max(size, 1):
        return True
    near = np.flatnonzero(obj <= lo + 0.05 * (hi - lo))
    n = len(obj)
    sep = np.minimum(np.abs(near - j), n - np.abs(near - j))
    return bool(np.any(sep > n // 36))


# -- equivariance ---------------------------------------------------------------------------------
def rotation_about(L: AffineSubspace, angle: float) -> np.ndarray:
    """Matrix of the rotation by ``angle`` about the (n-2)-plane ``L`` (linear part)."""
    W = _plane_frame(L)
    n = L.n
    M = np.eye(n) - W.T @ W + W.T @ _rot2(angle) @ W
    return M


def rotate_grid(b: GridBody, M: np.ndarray, about) -> GridBody:
    """Cells of the same lattice whose centers map back into ``b`` under ``M``."""
    about = as_vector(about, b.n)
    X = b.occupied_centers()
    Y = (X - about) @ M.T + about
    lo, hi = Y.min(axis=0) - 2 * b.h, Y.max(axis=0) + 2 * b.h
    io = np.floor(lo / b.h).astype(np.int64)
    shape = tuple(np.ceil(hi / b.h).astype(np.int64) - io)
    probe = GridBody(np.zeros(shape, bool), b.h, io, allow_empty=True)
    Z = probe.all_centers()
    back = (Z - about) @ M + about
    return GridBody(b.contains(back).reshape(shape), b.h, io)


def projection_equivariance_check(b: GridBody, L: AffineSubspace, M: np.ndarray, n_centers: int = 4,
                                  image_angle: float | None = None, tol_cells: int = 1) -> bool:
    """Images of ``M b`` equal the in-plane rotated images of ``b`` for centers on ``L``.

    ``image_angle`` overrides the in-plane rotation applied to the images
    (by default the angle of ``M`` restricted to the plane orthogonal to ``L``).
    """
    W = _plane_frame(L)
    if np.any(L.distance(b.occupied_centers()) <= 0.5 * b.h * np.sqrt(b.n)):
        raise ValidationError("body must be disjoint from the axis")
    R2 = W @ M @ W.T
    if image_angle is not None:
        R2 = _rot2(image_angle)
    rb = rotate_grid(b, M, L.base)
    t = (b.occupied_centers() - L.base) @ L.basis.T
    lo, hi = t.min(axis=0), t.max(axis=0)
    for i in range(n_centers):
        C = L.from_coords(lo + (hi - lo) * (i + 0.5) / n_centers)
        pp = PuncturedPlane.through(C, W)
        A = _cells_of(_image_points(b, pp) @ R2.T, b.h)
        B = _cells_of(_image_points(rb, pp), b.h)
        if _cell_set_mismatch(A, B, tol_cells) > 0:
            return False
    return True


__all__ = [
    "ReconstructionReport",
    "RegistrationResult",
    "supporting_centers",
    "toward_body",
    "line_profiles",
    "carve_reconstruct",
    "check_group_equivalence",
    "surrounds_plane",
    "recover_rotation",
    "rotation_about",
    "rotate_grid",
    "projection_equivariance_check",
    "GROUPS",
]
