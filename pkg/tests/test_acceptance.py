"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import time

import numpy as np
import pytest

from circon import cli, corpus
from circon.bodies import (
    ImplicitBody,
    diameter,
    is_subset,
    rasterize,
    symmetric_difference_volume,
)
from circon.classifiers import BodyContext, classify
from circon.geometry import AffineSubspace, PuncturedPlane, orthonormalize
from circon.hulls import eps_visual_hull, hull_domain, visual_hull
from circon.projections import ProjectionFamily, circular_project_point, positive_circular_projection
from circon.suites import inclusion_suite
from circon.tomo import (
    carve_reconstruct,
    check_group_equivalence,
    line_profiles,
    recover_rotation,
    rotate_grid,
    rotation_about,
    supporting_centers,
    toward_body,
)

Z_AXIS = AffineSubspace(np.zeros(3), np.array([[0.0, 0.0, 1.0]]))


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\nacceptance {number:2d} {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail

    return emit


@pytest.fixture(scope="module")
def suite():
    return inclusion_suite()


def verdicts(rows):
    return {(r.key, r.class_id, r.k, r.eps, r.m): r.verdict for r in rows}


def slice_oracle(C, basis, x, m=10_000):
    """Nearest of ``m`` quasi-uniform points on the sphere slice through ``x``; returns (point, resolution)."""
    r = np.linalg.norm(x - C)
    d = basis.shape[0]
    if d == 1:
        U = np.array([[1.0], [-1.0]])
        res = 0.0
    elif d == 2:
        t = 2 * np.pi * np.arange(m) / m
        U = np.stack([np.cos(t), np.sin(t)], axis=1)
        res = 2 * np.pi * r / m
    else:
        # Fibonacci lattice on the 2-sphere
        i = np.arange(m) + 0.5
        z = 1 - 2 * i / m
        phi = np.pi * (1 + 5 ** 0.5) * i
        s = np.sqrt(1 - z * z)
        U = np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=1)
        res = r * np.sqrt(4 * np.pi / m)
    P = C + r * U @ basis
    return P[np.argmin(np.linalg.norm(P - x, axis=1))], res


def test_acceptance_01_circular_projection_oracle(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst_ratio, worst_dist = 0.0, 0.0
    for n in (2, 3, 4):
        for _ in range(1000):
            k = int(rng.integers(1, n))
            basis = orthonormalize(rng.standard_normal((n - k, n)))
            pp = PuncturedPlane.through(rng.standard_normal(n), basis)
            x = pp.center + 3 * rng.standard_normal(n)
            y = circular_project_point(pp, x)
            o, res = slice_oracle(pp.center, pp.plane.basis, x)
            err = np.linalg.norm(y - o)
            worst_ratio = max(worst_ratio, err / (2 * res) if res > 0 else err / 1e-9)
            worst_dist = max(worst_dist, abs(np.linalg.norm(y - pp.center) - np.linalg.norm(x - pp.center)))
    secs = time.perf_counter() - t0
    ok = worst_ratio <= 1.0 and worst_dist <= 1e-10 and secs < 10
    report(1, ok, f"oracle error / (2 res) max {worst_ratio:.3f}, distance drift {worst_dist:.1e}, {secs:.1f}s")


def test_acceptance_02_annulus_eps_hull(report):
    t0 = time.perf_counter()
    b = rasterize(corpus.annulus(2.0, 3.0), 0.05)
    res = eps_visual_hull(b, 1.0, 1, 256)
    disk = rasterize(corpus.ball(3.0), 0.05)
    rel = symmetric_difference_volume(res.hull, disk) / (9 * np.pi)
    secs = time.perf_counter() - t0
    ok = rel <= 0.05 and secs < 60
    report(2, ok, f"hull vs B(0,3) relative symmetric difference {rel:.4f}, {secs:.1f}s")


def test_acceptance_03_positive_projection_failure(report):
    h = 0.05
    ring = rasterize(corpus.ring_plus_ball(1.0, with_ball=False), h)
    both = rasterize(corpus.ring_plus_ball(1.0, with_ball=True), h)
    same = 0
    for a in 2 * np.pi * np.arange(64) / 64:
        Z = 2.0 * np.array([np.cos(a), np.sin(a)])
        p1, p2 = positive_circular_projection(Z, ring), positive_circular_projection(Z, both)
        same += int(p1.offset == p2.offset and np.array_equal(p1.bins, p2.bins))
    diff = symmetric_difference_volume(ring, both)
    ok = same == 64 and diff >= 0.9 * np.pi
    report(3, ok, f"{same}/64 unsigned profiles identical, volume difference {diff:.4f}")


def test_acceptance_04_carving_uniqueness(report):
    h = 0.01
    lines = []
    ok = True
    for name, body in (("ball d=0.4", corpus.ball(0.2)), ("blob d=0.45", corpus.blob(2))):
        t0 = time.perf_counter()
        b = rasterize(body, h)
        member = classify(b, "Keps2", 1, eps=1.0).verdict
        C = supporting_centers(b, 1.0, 256, seed=0)
        rep = carve_reconstruct(line_profiles(b, C, toward_body(b, C)), hull_domain(b, 4 * h), truth=b)
        rel = rep.residual_volume / b.volume
        secs = time.perf_counter() - t0
        ok &= member == "MEMBER" and rel <= 0.05 and secs < 120
        lines.append(f"{name}: Keps2 {member}, residual {rel:.4f}, {secs:.1f}s")
    report(4, ok, "; ".join(lines))


def test_acceptance_05_inclusion_consistency(report, suite):
    detail = f"{len(suite.rows)} verdicts, {len(suite.violations)} violations"
    if suite.violations:
        detail += ": " + "; ".join(suite.violations[:5])
    report(5, suite.ok, detail)


def test_acceptance_06_named_examples(report, suite):
    v = verdicts(suite.rows)
    checks = {
        "chessboard K1w": v[("chessboard", "K1w", 1, None, None)] == "MEMBER",
        "chessboard K1 no cert": v[("chessboard", "K1", 1, None, None)] == "NO_CERTIFICATE",
        "helicoid K1w": v[("helicoid", "K1w", 1, None, None)] == "MEMBER",
        "helicoid K1 no cert": v[("helicoid", "K1", 1, None, None)] == "NO_CERTIFICATE",
        "envelope K1": v[("envelope", "K1", 1, None, None)] == "MEMBER",
    }
    b = corpus.corpus_entry("envelope").grid()
    w = corpus.ENVELOPE_WITNESS
    margin = float(np.min(np.linalg.norm(b.occupied_centers() - w, axis=1)))
    at_w = classify(b, "K2", 1, witnesses=[w], context=BodyContext(b)).verdict
    checks["envelope K2 no cert at witness"] = at_w == "NO_CERTIFICATE"
    checks["witness margin >= 4h"] = margin >= 4 * b.h
    failed = [k for k, good in checks.items() if not good]
    report(6, not failed, "all named verdicts hold" if not failed else "failed: " + ", ".join(failed))


def test_acceptance_07_hull_fixed_point_matches_class(report, suite):
    v = verdicts(suite.rows)
    mismatches, compared = [], 0
    for e in corpus.CORPUS:
        b = e.grid()
        for k in range(1, b.n):
            fixed = visual_hull(b, ProjectionFamily("AllOrthogonal", k, b.n, 64, seed=0)).fixed_point
            member = v[(e.key, "K2", k, None, None)] == "MEMBER"
            compared += 1
            if fixed != member:
                mismatches.append(f"{e.key} K2 k={k} fixed={fixed}")
        if diameter(b) < 1.0:
            for k in range(1, b.n):
                fixed = eps_visual_hull(b, 1.0, k, 64).fixed_point
                member = v[(e.key, "Keps2", k, 1.0, None)] == "MEMBER"
                compared += 1
                if fixed != member:
                    mismatches.append(f"{e.key} Keps2 k={k} fixed={fixed}")
    report(7, not mismatches, f"{compared} comparisons, mismatches: {', '.join(mismatches) or 'none'}")


def test_acceptance_08_rotation_recovery(report):
    b = rasterize(corpus.blob(3, center=(1.0, 0.3, 0.2)), 0.05)
    errors = []
    ok = True
    for deg in (10.0, 40.0, 90.0, 170.0):
        b2 = rotate_grid(b, rotation_about(Z_AXIS, np.radians(deg)), Z_AXIS.base)
        res = recover_rotation(b, b2, Z_AXIS, n_centers=8, n_angles=720)
        err = abs(np.degrees(np.angle(np.exp(1j * (res.parameter - np.radians(deg))))))
        errors.append(err)
        ok &= err <= 2.0 and res.consistent and not res.ambiguous

    def ring(x):
        r = np.hypot(x[:, 0], x[:, 1])
        return (r >= 0.5) & (r <= 1.0) & (np.abs(x[:, 2]) <= 0.3)

    sym = rasterize(ImplicitBody(ring, [-1, -1, -0.5], [1, 1, 0.5]), 0.1)
    amb = recover_rotation(sym, sym, Z_AXIS, n_centers=2, n_angles=720).ambiguous
    ok &= amb
    report(8, ok, f"angle errors (deg) {', '.join(f'{e:.3f}' for e in errors)}; symmetric body ambiguous={amb}")


def test_acceptance_09_constant_width_regime(report):
    h = 0.01
    r = rasterize(corpus.reuleaux(1.0), h)
    d = rasterize(corpus.ball(0.5), h)
    res = check_group_equivalence(r, d, ProjectionFamily("AllOrthogonal", 1, 2, 360, seed=0), "translation")
    worst = max(res.per_member_residuals)
    ok = worst == 0.0 and res.ambient_residual > 0.1 and res.outside_lemma
    report(9, ok, f"max member residual {worst}, ambient difference {res.ambient_residual:.3f}")


def test_acceptance_10_determinism_and_antitonicity(report, tmp_path):
    args = ["hull", "--body", "annulus:inner=2,outer=3", "--h", "0.1",
            "--family", "circ-eps:k=1,eps=1,N=64", "--no-figures"]
    outs = []
    for name in ("a", "b"):
        assert cli.main(args + ["--out", str(tmp_path / name)]) == 0
        outs.append({p.name: p.read_bytes() for p in sorted((tmp_path / name).iterdir())
                     if p.name != "run.config"})
    same = outs[0] == outs[1]
    bad = []
    for e in corpus.CORPUS:
        b = e.grid()
        dom = diameter(b)
        h64 = visual_hull(b, ProjectionFamily("AllOrthogonal", 1, b.n, 64, seed=0), margin=dom).hull
        h256 = visual_hull(b, ProjectionFamily("AllOrthogonal", 1, b.n, 256, seed=0), margin=dom).hull
        if not is_subset(h256, h64):
            bad.append(e.key)
    ok = same and not bad
    report(10, ok, f"byte-identical={same}; hull(256) within hull(64) fails on: {', '.join(bad) or 'none'}")
