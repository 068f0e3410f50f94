import numpy as np
import pytest
from hypothesis import given, strategies as st

from circon import corpus
from circon.bodies import (
    GridBody,
    ImplicitBody,
    boundary_cells,
    coincide,
    convex_hull,
    is_subset,
    metrics,
    rasterize,
    symmetric_difference_volume,
)
from circon.errors import BadParams, EmptyBody, ResolutionTooCoarse, UnknownCorpusName


def block_grid(mask, h=1.0, origin=(0, 0)):
    return GridBody(np.asarray(mask, bool), h, np.asarray(origin))


# -- rasterize -------------------------------------------------------------------------
def test_rasterize_unit_disk_coarse():
    b = rasterize(corpus.ball(1.0), 0.5)
    assert b.contains(np.zeros((1, 2)))[0]
    assert all(4 <= s <= 8 for s in b.shape)


def test_rasterize_empty_predicate():
    empty = ImplicitBody(lambda x: np.zeros(len(x), bool), np.zeros(2), np.ones(2))
    with pytest.raises(EmptyBody):
        rasterize(empty, 0.1)


def test_rasterize_too_coarse():
    with pytest.raises(ResolutionTooCoarse):
        rasterize(corpus.ball(1.0), 1.0)


def test_annulus_area():
    b = rasterize(corpus.annulus(2, 3), 0.1)
    assert abs(b.volume - 5 * np.pi) <= 0.05 * 5 * np.pi
    assert b.count == 1564  # frozen


def test_rasterize_agrees_with_predicate_away_from_boundary(rng):
    body = corpus.ball(1.0, n=3)
    h = 0.05
    b = rasterize(body, h)
    X = rng.uniform(-1.1, 1.1, size=(4000, 3))
    r = np.linalg.norm(X, axis=1)
    X = X[np.abs(r - 1.0) > h][:1000]
    assert len(X) == 1000
    assert np.array_equal(b.contains(X), body(X))


# -- boundary and metrics ------------------------------------------------------------------
def test_boundary_of_block():
    b = block_grid(np.ones((3, 3)))
    assert boundary_cells(b) == {(i, j) for i in range(3) for j in range(3)} - {(1, 1)}


def test_boundary_single_cell():
    b = block_grid([[0, 0, 0], [0, 1, 0], [0, 0, 0]])
    assert boundary_cells(b) == {(1, 1)}


def test_disk_perimeter():
    b = rasterize(corpus.ball(1.0), 0.05)
    n = len(boundary_cells(b))
    assert abs(n * 0.05 - 2 * np.pi) <= 0.15 * 2 * np.pi
    assert n == 112  # frozen


def test_metrics_square():
    b = rasterize(corpus.block(1.0), 0.05)
    assert abs(metrics(b).diameter - np.sqrt(2)) <= 0.05 * np.sqrt(2) + 0.05


def test_metrics_annulus_topology():
    m = metrics(rasterize(corpus.annulus(2, 3), 0.1))
    assert (m.component_count, m.boundary_component_count) == (1, 2)


def test_metrics_two_blocks():
    mask = np.zeros((10, 4), bool)
    mask[1:3, 1:3] = mask[6:9, 1:3] = True
    assert metrics(block_grid(mask)).component_count == 2


@pytest.mark.parametrize("R,h", [(1.0, 0.05), (0.5, 0.02), (0.8, 0.1)])
def test_ball_diameter(R, h):
    for n in (2, 3):
        d = metrics(rasterize(corpus.ball(R, n=n), h)).diameter
        assert 2 * R - 2 * h <= d <= 2 * R + 2 * h


@pytest.mark.parametrize("inner,h", [(1.0, 0.1), (2.0, 0.1), (1.5, 0.05)])
def test_annulus_two_boundary_components(inner, h):
    b = rasterize(corpus.annulus(inner, inner + 1), h)
    assert metrics(b).boundary_component_count == 2


# -- convex hull --------------------------------------------------------------------------------
def test_convex_hull_of_L_shape():
    mask = np.zeros((12, 12), bool)
    mask[2:10, 2:4] = True
    mask[2:4, 2:10] = True
    b = block_grid(mask)
    H = convex_hull(b)
    # oracle: the hull of the occupied centers is the pentagon with these vertices
    V = np.array([(2.5, 2.5), (9.5, 2.5), (9.5, 3.5), (3.5, 9.5), (2.5, 9.5)])
    C = b.all_centers()
    inside = np.ones(len(C), bool)
    for i in range(len(V)):
        p, q = V[i], V[(i + 1) % len(V)]
        cross = (q[0] - p[0]) * (C[:, 1] - p[1]) - (q[1] - p[1]) * (C[:, 0] - p[0])
        inside &= cross >= -1e-9
    assert np.array_equal(H.occupancy.ravel(), inside)


def test_convex_hull_of_convex_block():
    b = rasterize(corpus.block(1.0), 0.1)
    assert np.array_equal(convex_hull(b).occupancy, b.occupancy)


def test_convex_hull_of_two_cells():
    mask = np.zeros((10, 8), bool)
    mask[1, 1] = mask[7, 5] = True
    b = block_grid(mask)
    H = convex_hull(b)
    C = b.all_centers()
    p, q = np.array([1.5, 1.5]), np.array([7.5, 5.5])
    t = np.clip((C - p) @ (q - p) / np.dot(q - p, q - p), 0, 1)
    dist = np.linalg.norm(C - (p + t[:, None] * (q - p)), axis=1)
    assert np.array_equal(H.occupancy.ravel(), dist <= 1e-9)
    assert H.count == 3  # (1,1), (4,3), (7,5)


@pytest.mark.parametrize("key", ["chessboard", "annulus", "reuleaux"])
def test_convex_hull_idempotent_and_monotone(key, rng):
    b = corpus.corpus_entry(key).grid()
    H = convex_hull(b)
    assert np.array_equal(convex_hull(H).occupancy, H.occupancy)
    occ = b.occupancy & (rng.random(b.shape) < 0.5)
    sub = b.with_occupancy(occ)
    assert is_subset(convex_hull(sub), H)


# -- generators -----------------------------------------------------------------------------------
def test_generate_annulus_membership():
    body = corpus.generate("annulus", inner=2, outer=3)
    pts = np.array([[2.5, 0], [0, 1.9], [3.1, 0], [-2.01, 0]])
    assert body(pts).tolist() == [True, False, False, True]


def test_generate_chessboard():
    b = rasterize(corpus.generate("chessboard", cells=8), 0.25)
    assert b.count * 0.25**2 == pytest.approx(32.0)


def test_generate_ring_plus_ball():
    body = corpus.generate("ring_plus_ball", eps=1.0)
    pts = np.array([[0.5, 0], [2, 0], [4, 0], [5.5, 0]])
    assert body(pts).tolist() == [True, False, True, False]


def test_reuleaux_constant_width():
    body = corpus.generate("reuleaux", width=1.0)
    b = rasterize(body, 0.01)
    P = b.occupied_centers()
    for a in np.linspace(0, np.pi, 12, endpoint=False):
        w = P @ np.array([np.cos(a), np.sin(a)])
        assert w.max() - w.min() == pytest.approx(1.0, abs=2 * 0.01)


def test_envelope_witness_outside():
    body = corpus.generate("envelope_body")
    assert not body(corpus.ENVELOPE_WITNESS[None])[0]
    b = rasterize(body, 0.025)
    d = np.min(np.linalg.norm(b.occupied_centers() - corpus.ENVELOPE_WITNESS, axis=1))
    assert d >= 4 * 0.025


def test_helicoid_points():
    body = corpus.generate("helicoid_body")
    # (u cos v, u sin v, t) with v <= t <= v + 1
    v, u = 1.0, 0.5
    assert body(np.array([[u * np.cos(v), u * np.sin(v), v + 0.5]]))[0]
    assert not body(np.array([[u * np.cos(v), u * np.sin(v), v + 1.5]]))[0]


def test_unknown_name_and_bad_params():
    with pytest.raises(UnknownCorpusName):
        corpus.generate("torus")
    with pytest.raises(BadParams):
        corpus.generate("annulus", inner=3, outer=2)
    with pytest.raises(BadParams):
        corpus.generate("ball", wobble=1)


# -- body equality and io ------------------------------------------------------------------------------
def test_coincide_tolerates_boundary_noise():
    a = rasterize(corpus.ball(1.0), 0.05)
    b = rasterize(corpus.ball(1.03), 0.05)
    c = rasterize(corpus.ball(0.7), 0.05)
    assert coincide(a, b)
    assert not coincide(a, c)
    assert symmetric_difference_volume(a, a) == 0


@given(st.integers(0, 2**31 - 1), st.sampled_from([2, 3]))
def test_gbody_roundtrip(tmp_path_factory, seed, n):
    rng = np.random.default_rng(seed)
    shape = tuple(rng.integers(1, 7, size=n))
    occ = rng.random(shape) < 0.5
    occ.flat[0] = True
    b = GridBody(occ, float(rng.uniform(0.01, 1)), rng.integers(-20, 20, size=n))
    p = tmp_path_factory.mktemp("g") / "b.gbody"
    b.save(p)
    c = GridBody.load(p)
    assert c.h == b.h
    assert np.array_equal(c.index_origin, b.index_origin)
    assert np.array_equal(c.occupancy, b.occupancy)
    assert p.read_bytes() == c.save(p.with_name("c.gbody")).read_bytes()
