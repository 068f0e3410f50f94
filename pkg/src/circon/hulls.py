"""Visual hulls of grid bodies with respect to finite projection families.

A cell of the hull domain survives when, for every family member ``f``,
the chart cell of ``f(x)`` is occupied in ``f(b)`` (optionally within one
neighbouring cell).  Carving visits the members in enumeration order and
only re-tests surviving cells, so the first member that excludes a cell is
recorded as its witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bodies import GridBody, coincide, diameter
from .errors import BadParams, EmptyFamily, ValidationError
from .geometry import meridian_distance
from .projections import ProjectionFamily, ProjectionMap, check_skipped, enumerate_family

MAX_DOMAIN_CELLS = 40_000_000
_BLOCK = 1 << 20


@dataclass
class HullResult:
    hull: GridBody
    family: ProjectionFamily
    members: list
    excluded_by: np.ndarray  # member index per domain cell, -1 inside the hull
    fixed_point: bool
    tol_cells: int = 1
    excluded_witnesses: dict = field(default_factory=dict)

    def witness_log(self, limit: int = 1000) -> str:
        idx = np.argwhere(self.excluded_by >= 0)[:limit]
        lines = [f"cells {int(np.count_nonzero(self.excluded_by >= 0))}"]
        for c in idx:
            lines.append(" ".join(str(int(v)) for v in c + self.hull.index_origin)
                         + f" member {int(self.excluded_by[tuple(c)])}")
        return "\n".join(lines) + "\n"


def hull_domain(b: GridBody, margin: float) -> GridBody:
    pad = int(np.ceil(margin / b.h))
    size = np.prod(np.array(b.shape) + 2 * pad, dtype=float)
    if size > MAX_DOMAIN_CELLS:
        raise BadParams(f"hull domain of {size:.3g} cells is too large; pass a smaller margin")
    return b.padded(pad)


def carve(b: GridBody, members: list[ProjectionMap], domain: GridBody, tol_cells: int = 1,
          strict_skip: bool = False, images=None):
    """Carve ``domain`` cells against the images of ``b``; returns (hull mask, excluded_by)."""
    if not members:
        raise EmptyFamily("empty projection family")
    if images is None:
        images = []
        for f in members:
            img = f.image(b)
            check_skipped(img, b, strict_skip)
            images.append(img)
    excluded_by = np.full(domain.shape, -1, dtype=np.int32)
    flat_ex = excluded_by.reshape(-1)
    alive = np.arange(flat_ex.size)
    shape = np.array(domain.shape)
    for j, (f, img) in enumerate(zip(members, images)):
        if len(alive) == 0:
            break
        keep = np.ones(len(alive), bool)
        for s in range(0, len(alive), _BLOCK):
            ids = alive[s:s + _BLOCK]
            X = domain.centers(np.stack(np.unravel_index(ids, shape), axis=1))
            T, ok = f.coords(X)
            inside = img.contains_coords(T, tol_cells)
            # points where the map is undefined are not constrained by it
            keep[s:s + _BLOCK] = inside | ~ok
        flat_ex[alive[~keep]] = j
        alive = alive[keep]
    return excluded_by < 0, excluded_by


def _result(b, fam, members, domain, tol_cells, strict_skip, images=None) -> HullResult:
    mask, excluded_by = carve(b, members, domain, tol_cells, strict_skip, images)
    hull = domain.with_occupancy(mask)
    wit = {}
    for c in np.argwhere(excluded_by >= 0)[:1000]:
        wit[tuple(int(v) for v in c + domain.index_origin)] = int(excluded_by[tuple(c)])
    return HullResult(hull, fam, members, excluded_by, coincide(hull, b), tol_cells, wit)


def visual_hull(b: GridBody, fam: ProjectionFamily, tol_cells: int = 1, margin: float | None = None,
                images=None) -> HullResult:
    """Hull for an orthogonal family; domain is the box dilated by the diameter."""
    if fam.kind != "AllOrthogonal":
        raise ValidationError("visual_hull needs an orthogonal family")
    if fam.n != b.n:
        raise ValidationError("family and body dimensions differ")
    members = enumerate_family(fam)
    m = diameter(b) if margin is None else margin
    return _result(b, fam, members, hull_domain(b, m), tol_cells, False, images)


def c_visual_hull(b: GridBody, fam: ProjectionFamily, tol_cells: int = 1, margin: float | None = None,
                  members=None, images=None) -> HullResult:
    """Hull for a circular family; domain margin ``max(1/eps, 2 diam)`` unless given."""
    if not fam.circular:
        raise ValidationError("c_visual_hull needs a circular family")
    if fam.n != b.n:
        raise ValidationError("family and body dimensions differ")
    if margin is None:
        margin = 2 * diameter(b)
        if fam.eps:
            margin = max(margin, 1.0 / fam.eps)
    members = enumerate_family(fam) if members is None else members
    return _result(b, fam, members, hull_domain(b, margin), tol_cells,
                   fam.kind == "CircularEps", images)


def eps_visual_hull(b: GridBody, eps: float, k: int, N: int, seed: int = 0, tol_cells: int = 1,
                    margin: float | None = None) -> HullResult:
    if not eps > 0:
        raise ValidationError("eps must be positive")
    fam = ProjectionFamily("CircularEps", k, b.n, N, seed=seed, body=b, eps=eps)
    return c_visual_hull(b, fam, tol_cells, margin)


def equivalence_union(b: GridBody, fam: ProjectionFamily, tol_cells: int = 1, margin: float | None = None):
    """Union of all bodies whose images under ``fam`` equal those of ``b``.

    On closed occupancy sets this coincides with the hull computed from
    image inclusion, so it simply delegates.
    """
    if fam.circular:
        return c_visual_hull(b, fam, tol_cells, margin)
    return visual_hull(b, fam, tol_cells, margin)


def rehull(result: HullResult) -> HullResult:
    """Apply the same hull operator (same members) to a previous hull."""
    b = result.hull
    members = result.members
    images = [f.image(b) for f in members]
    return _result(b, result.family, members, b, result.tol_cells, False, images)


def meridian_misses(member: ProjectionMap, x, b: GridBody, tol: float | None = None) -> bool:
    """True when the fiber of ``member`` through ``x`` stays away from every body cell."""
    if not member.circular:
        raise ValidationError("fibers of orthogonal maps are planes; use the image test")
    tol = b.h * np.sqrt(b.n) if tol is None else tol
    d = meridian_distance(member.target, x, b.occupied_centers())
    return bool(np.min(d) > tol)


__all__ = [
    "HullResult",
    "hull_domain",
    "carve",
    "visual_hull",
    "c_visual_hull",
    "eps_visual_hull",
    "equivalence_union",
    "rehull",
    "meridian_misses",
]
