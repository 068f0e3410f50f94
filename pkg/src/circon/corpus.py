"""Analytic generators for the example bodies.

Each generator returns an :class:`~circon.bodies.ImplicitBody`; parameters
are plain keyword arguments so they can come straight from the CLI
(``annulus:inner=2,outer=3``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bodies import ImplicitBody
from .errors import BadParams, UnknownCorpusName


def _need(cond, msg):
    if not cond:
        raise BadParams(msg)


def ball(radius=1.0, n=2, center=None):
    n = int(n)
    _need(radius > 0, "radius must be positive")
    c = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    return ImplicitBody(lambda x: np.linalg.norm(x - c, axis=1) <= radius,
                        c - radius, c + radius, "ball")


def block(size=1.0, n=2, lo=None):
    n = int(n)
    _need(size > 0, "size must be positive")
    lo = np.zeros(n) if lo is None else np.asarray(lo, dtype=float)
    hi = lo + size
    return ImplicitBody(lambda x: np.all((x >= lo) & (x <= hi), axis=1), lo, hi, "block")


def annulus(inner=2.0, outer=3.0, n=2, center=None):
    n = int(n)
    _need(0 < inner < outer, "need 0 < inner < outer")
    c = np.zeros(n) if center is None else np.asarray(center, dtype=float)

    def member(x):
        r = np.linalg.norm(x - c, axis=1)
        return (r >= inner) & (r <= outer)

    return ImplicitBody(member, c - outer, c + outer, "annulus")


def large_annulus(eps=1.0, n=2):
    _need(eps > 0, "eps must be positive")
    body = annulus(2.0 / eps, 3.0 / eps, n)
    return ImplicitBody(body.membership, body.lo, body.hi, "large_annulus")


def ring_plus_ball(eps=1.0, n=2, with_ball=True):
    """Ring ``1+2/eps <= |x| <= 3+2/eps``, optionally united with ``B(0, 1)``."""
    _need(eps > 0, "eps must be positive")
    inner, outer = 1 + 2 / eps, 3 + 2 / eps
    with_ball = bool(with_ball) and str(with_ball).lower() not in ("0", "false", "no")

    def member(x):
        r = np.linalg.norm(x, axis=1)
        inside = (r >= inner) & (r <= outer)
        return inside | (r <= 1.0) if with_ball else inside

    n = int(n)
    return ImplicitBody(member, -outer * np.ones(n), outer * np.ones(n),
                        "ring_plus_ball" if with_ball else "ring")


def chessboard(cells=8, n=2, square=1.0):
    """Union of the closed black squares (cubes) of a ``cells^n`` board."""
    n, cells = int(n), int(cells)
    _need(cells >= 2, "need at least a 2x2 board")

    def member(x):
        k = np.floor(x / square).astype(np.int64)
        return (k.sum(axis=1) % 2) == 0

    return ImplicitBody(member, np.zeros(n), cells * square * np.ones(n), "chessboard")


def helicoid_body(turn=2 * np.pi, thickness=1.0):
    """Solid between the helicoids ``[u cos v, u sin v, v]`` and ``[.., v + thickness]``.

    Parameter domain ``0 <= v <= turn``, ``0 <= u <= 1``.
    """
    _need(0 < turn <= 2 * np.pi, "turn must be in (0, 2*pi]")
    _need(thickness > 0, "thickness must be positive")

    def member(x):
        rho = np.hypot(x[:, 0], x[:, 1])
        phi = np.mod(np.arctan2(x[:, 1], x[:, 0]), 2 * np.pi)
        z = x[:, 2]
        hit = np.zeros(len(x), dtype=bool)
        for v in (phi, phi + 2 * np.pi):
            hit |= (v <= turn) & (z >= v) & (z <= v + thickness)
        return (rho <= 1.0) & hit

    return ImplicitBody(member, np.array([-1.0, -1.0, 0.0]),
                        np.array([1.0, 1.0, turn + thickness]), "helicoid_body")


def _plate(start, direction, length, half_thickness, xr):
    """Slab in E^3: x in ``xr``, (y, z) within the rectangle around a segment."""
    p = np.asarray(start, dtype=float)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    nrm = np.array([-d[1], d[0]])

    def member(x):
        yz = x[:, 1:] - p
        t = yz @ d
        s = yz @ nrm
        return ((x[:, 0] >= xr[0]) & (x[:, 0] <= xr[1]) & (t >= 0) & (t <= length)
                & (np.abs(s) <= half_thickness))

    return member


def envelope_body(bend=85.0, thickness=0.1, slit=0.15, overhang=0.5):
    """Four plates around the unit cube ``[-1/2, 1/2]^3``, open at ``x = ±1/2``.

    The plates cover the faces ``z = -1/2`` (bottom), ``y = 1/2`` (back),
    ``z = 1/2`` (top) and ``y = -1/2`` (front) in a pinwheel: each plate
    stops ``slit`` short of one corner and overhangs the next corner by
    ``overhang``, so the inner surface of every plate can be extended to a
    plane that leaves the box through a slit while no straight line of sight
    from deep inside the box reaches the outside in the ``yz`` section.  The
    front plate hangs from its upper end at ``bend`` degrees from the top
    face, leaning inwards (90 would be flush with the cube face).
    """
    _need(0 < thickness < slit, "need 0 < thickness < slit")
    _need(60 <= bend <= 90, "bend must be in [60, 90] degrees")
    c = thickness / 2
    xr = (-0.5, 0.5)
    tilt = np.radians(90.0 - bend)
    plates = [
        _plate((-0.5 + slit, -0.5), (1, 0), 1 - slit + overhang, c, xr),     # bottom
        _plate((0.5, -0.5 + slit), (0, 1), 1 - slit + overhang, c, xr),      # back
        _plate((0.5 - slit, 0.5), (-1, 0), 1 - slit + overhang, c, xr),      # top
        _plate((-0.5, 0.5 - slit), (np.sin(tilt), -np.cos(tilt)), 1 - slit + overhang, c, xr),  # front
    ]

    def member(x):
        out = np.zeros(len(x), dtype=bool)
        for p in plates:
            out |= p(x)
        return out

    r = 0.5 + overhang + thickness
    return ImplicitBody(member, np.array([-0.5, -r - 0.1, -r - 0.1]), np.array([0.5, r, r]), "envelope_body")


ENVELOPE_WITNESS = np.array([0.0, -0.25, 0.25])


def pi_body(wall=0.2, gap=0.8, height=1.0, depth=1.0):
    """U-channel: a floor plus two walls, open on top."""
    _need(gap >= 3 * wall, "wall gap must be at least 3x the wall thickness")
    width = 2 * wall + gap

    def member(x):
        inx = (x[:, 0] >= 0) & (x[:, 0] <= width) & (x[:, 1] >= 0) & (x[:, 1] <= depth)
        floor = x[:, 2] <= wall
        walls = (x[:, 0] <= wall) | (x[:, 0] >= width - wall)
        return inx & (x[:, 2] >= 0) & (x[:, 2] <= height) & (floor | walls)

    return ImplicitBody(member, np.zeros(3), np.array([width, depth, height]), "pi_body")


def reuleaux(width=1.0, center=None):
    """Reuleaux triangle of constant width ``width`` centered at its centroid."""
    _need(width > 0, "width must be positive")
    c = np.zeros(2) if center is None else np.asarray(center, dtype=float)
    ang = np.pi / 2 + 2 * np.pi * np.arange(3) / 3
    verts = c + (width / np.sqrt(3)) * np.stack([np.cos(ang), np.sin(ang)], axis=1)

    def member(x):
        d = np.linalg.norm(x[:, None, :] - verts[None], axis=-1)
        return np.all(d <= width, axis=1)

    r = width
    return ImplicitBody(member, c - r, c + r, "reuleaux")


def blob(n=2, scale=1.0, center=None):
    """Convex egg without symmetries: half-ellipsoids with different semi-axes per side.

    In the plane the diameter is ``0.45 * scale`` (along the first axis).
    """
    n = int(n)
    _need(n in (2, 3), "blob is defined for n = 2, 3")
    c = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    if n == 2:
        pos = np.array([0.25, 0.15]) * scale
        neg = np.array([0.20, 0.11]) * scale
    else:
        pos = np.array([0.50, 0.35, 0.30]) * scale
        neg = np.array([0.30, 0.20, 0.20]) * scale

    def member(x):
        d = x - c
        ax = np.where(d >= 0, pos, neg)
        return np.sum((d / ax) ** 2, axis=1) <= 1.0

    return ImplicitBody(member, c - neg, c + pos, "blob")


GENERATORS = {
    "ball": ball,
    "block": block,
    "annulus": annulus,
    "chessboard": chessboard,
    "helicoid_body": helicoid_body,
    "envelope_body": envelope_body,
    "pi_body": pi_body,
    "reuleaux": reuleaux,
    "ring_plus_ball": ring_plus_ball,
    "large_annulus": large_annulus,
    "blob": blob,
}

ALIASES = {"envelope": "envelope_body", "helicoid": "helicoid_body", "pi": "pi_body", "ring": "ring_plus_ball"}


def generate(name: str, **params) -> ImplicitBody:
    key = ALIASES.get(name, name)
    if key not in GENERATORS:
        raise UnknownCorpusName(f"unknown corpus body {name!r}; known: {', '.join(sorted(GENERATORS))}")
    if name == "ring" and "with_ball" not in params:
        params["with_ball"] = False
    try:
        return GENERATORS[key](**params)
    except TypeError as exc:
        raise BadParams(f"{name}: {exc}") from exc


@dataclass(frozen=True)
class CorpusEntry:
    """A named body with the grid spacing used by the regression suites."""

    key: str
    name: str
    params: tuple
    h: float

    def body(self) -> ImplicitBody:
        return generate(self.name, **dict(self.params))

    def grid(self, h: float | None = None):
        from .bodies import rasterize

        return rasterize(self.body(), self.h if h is None else h)


CORPUS = (
    CorpusEntry("disk", "ball", (("radius", 1.0), ("n", 2)), 0.05),
    CorpusEntry("ball3", "ball", (("radius", 0.5), ("n", 3)), 0.05),
    CorpusEntry("annulus", "annulus", (("inner", 2.0), ("outer", 3.0)), 0.1),
    CorpusEntry("ring_plus_ball", "ring_plus_ball", (("eps", 1.0),), 0.1),
    CorpusEntry("chessboard", "chessboard", (("cells", 4),), 0.1),
    CorpusEntry("reuleaux", "reuleaux", (("width", 1.0),), 0.02),
    CorpusEntry("blob", "blob", (("n", 2),), 0.01),
    CorpusEntry("helicoid", "helicoid_body", (), 0.1),
    CorpusEntry("envelope", "envelope_body", (), 0.025),
    CorpusEntry("pi", "pi_body", (), 0.05),
)


def corpus_entry(key: str) -> CorpusEntry:
    for e in CORPUS:
        if e.key == key:
            return e
    raise UnknownCorpusName(f"unknown corpus entry {key!r}")
