import numpy as np
import pytest

from circon import corpus
from circon.bodies import coincide, convex_hull, metrics, rasterize
from circon.classifiers import (
    MEMBER,
    NO_CERTIFICATE,
    BodyContext,
    SearchBudget,
    Status,
    SupportingObject,
    classify,
    is_supporting,
    ray_vertex_check,
    revalidate,
)
from circon.errors import BadBudget, UnsupportedCombination, ValidationError
from circon.geometry import AffineSubspace


@pytest.fixture(scope="module")
def disk():
    return rasterize(corpus.ball(1.0), 0.05)


def grid(key):
    return corpus.corpus_entry(key).grid()


def line(base, direction):
    return SupportingObject("Plane", AffineSubspace.spanned(base, [direction]))


# -- is_supporting -----------------------------------------------------------------------------
def test_tangent_line_supports(disk):
    assert is_supporting(line((1.0, 0), (0, 1)), disk) == Status.SUPPORTING


def test_line_through_center_cuts(disk):
    assert is_supporting(line((0, 0), (1, 1)), disk) == Status.INTERSECTS_INTERIOR


def test_far_line_disjoint(disk):
    assert is_supporting(line((2.0, 0), (0, 1)), disk) == Status.DISJOINT


def test_delta_must_cover_grid(disk):
    with pytest.raises(ValidationError):
        is_supporting(line((1.0, 0), (0, 1)), disk, delta=0.01)


# -- named verdicts ------------------------------------------------------------------------------
def test_disk_k1_member(disk):
    v = classify(disk, "K1", 1)
    assert v.verdict == MEMBER and not v.failures


def test_chessboard_weak_but_not_strong():
    b = grid("chessboard")
    assert classify(b, "K1w", 1).verdict == MEMBER
    v = classify(b, "K1", 1)
    assert v.verdict == NO_CERTIFICATE
    assert 0 < len(v.failures) <= 10


def test_annulus_keps2():
    assert classify(grid("annulus"), "Keps2", 1, eps=1.0).verdict == MEMBER


def test_annulus_not_k1():
    assert classify(grid("annulus"), "K1", 1).verdict == NO_CERTIFICATE


def test_ball3_classes():
    b = grid("ball3")
    for cid, k in (("K1", 1), ("K1", 2), ("K2", 2)):
        assert classify(b, cid, k).verdict == MEMBER


def test_helicoid_weak_member():
    assert classify(grid("helicoid"), "K1w", 1).verdict == MEMBER


# -- certificates ------------------------------------------------------------------------------------
@pytest.mark.parametrize("key,cid,k,eps", [
    ("disk", "K1", 1, None), ("disk", "K2", 1, None), ("chessboard", "K1w", 1, None),
    ("annulus", "Keps2", 1, 1.0), ("annulus", "Keps1", 1, 1.0), ("ball3", "K1", 2, None),
    ("blob", "V2", 1, None), ("envelope", "K1", 1, None),
])
def test_certificates_revalidate(key, cid, k, eps):
    b = grid(key)
    ctx = BodyContext(b)
    v = classify(b, cid, k, eps=eps, context=ctx, budget=SearchBudget(max_certificates=8))
    assert v.certificates
    for obj in v.certificates.values():
        assert revalidate(obj, b, ctx)
        status = is_supporting(obj, b, context=ctx)
        assert status != Status.INTERSECTS_INTERIOR
        if obj.status == Status.DISJOINT:
            # the re-check's tolerance band may report a near-miss as touching
            assert status in (Status.DISJOINT, Status.SUPPORTING)


# -- dual path --------------------------------------------------------------------------------------------
@pytest.mark.parametrize("key", ["disk", "chessboard", "annulus", "reuleaux", "envelope"])
def test_ray_vertex_agrees_with_classify(key):
    b = grid(key)
    ctx = BodyContext(b)
    rng = np.random.default_rng(1)
    bd = ctx.boundary_centers[rng.choice(len(ctx.boundary_centers), 8, replace=False)]
    ext = ctx.exterior_candidates(None, 4)
    ext = ext[rng.choice(len(ext), 8, replace=False)]
    if key == "envelope":
        ext = np.vstack([ext, corpus.ENVELOPE_WITNESS])
    for cid, mode, pts in (("K1", "supporting", bd), ("K2", "disjoint", ext)):
        for x in pts:
            a = classify(b, cid, 1, witnesses=[x], context=ctx).verdict == MEMBER
            r = ray_vertex_check(b, x, 1, mode, context=ctx)
            assert a == r, (key, cid, x)


def test_ray_vertex_simple_cases(disk):
    assert ray_vertex_check(disk, (1.0 - 0.025, 0.025), 1, "supporting")
    assert not ray_vertex_check(disk, (0.0, 0.0), 1, "supporting")
    assert not ray_vertex_check(disk, (0.0, 0.0), 1, "disjoint")


@pytest.mark.parametrize("key", ["disk", "chessboard", "annulus", "blob"])
def test_v_equals_k_for_lines(key):
    b = grid(key)
    ctx = BodyContext(b)
    for i in (1, 2):
        assert classify(b, f"V{i}", 1, context=ctx).verdict == classify(b, f"K{i}", 1, context=ctx).verdict


# -- corpus invariants ---------------------------------------------------------------------------------------
@pytest.mark.parametrize("key", ["ball3", "reuleaux", "blob", "annulus", "chessboard"])
def test_boundary_connected_when_keps1_and_small(key):
    b = grid(key)
    eps = 0.5
    m = metrics(b)
    if m.diameter >= 1 / eps:
        pytest.skip("diameter not below 1/eps")
    if classify(b, "Keps1", b.n - 1, eps=eps).verdict == MEMBER:
        assert m.boundary_component_count == 1


@pytest.mark.parametrize("key", ["disk", "ball3", "annulus", "chessboard", "reuleaux", "blob", "pi"])
def test_v1_codim_one_is_convex(key):
    b = grid(key)
    if metrics(b).component_count != 1:
        pytest.skip("disconnected")
    if classify(b, "V1", b.n - 1).verdict == MEMBER:
        assert coincide(b, convex_hull(b))


def test_vm_below_k_runs():
    b = grid("ball3")
    v = classify(b, "V1", 2, m=1)
    assert v.m == 1 and v.verdict == MEMBER


# -- errors and reports ------------------------------------------------------------------------------------
def test_errors(disk):
    with pytest.raises(UnsupportedCombination):
        classify(disk, "K1", 2)
    with pytest.raises(UnsupportedCombination):
        classify(grid("ball3"), "V1", 1, m=2)
    with pytest.raises(BadBudget):
        SearchBudget(directions=0)
    with pytest.raises(ValidationError):
        classify(disk, "Keps1", 1)
    with pytest.raises(ValidationError):
        classify(disk, "K3", 1)


def test_report_format(disk):
    v = classify(disk, "K2", 1)
    text = v.report()
    assert text.splitlines()[:4] == ["class K2", "k 1", "eps -", "verdict MEMBER"]
    assert text == classify(disk, "K2", 1).report()
