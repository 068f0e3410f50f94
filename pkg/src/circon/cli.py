"""``circon`` command line: generation, projection, hulls, classification,
reconstruction, registration and corpus suites.

Exit status: 0 on success, 1 when a suite finds a violation, 2 on invalid
input, 3 on a runtime geometric failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import formats, plotting
from .bodies import GridBody, metrics, rasterize, symmetric_difference_volume
from .classifiers import CLASS_IDS, BodyContext, SearchBudget, classify, ray_vertex_check
from .config import RunConfig, parse_spec, worker_count
from .corpus import CORPUS, ENVELOPE_WITNESS, corpus_entry, generate
from .errors import CirconError, UnknownCorpusName, ValidationError
from .geometry import AffineSubspace
from .hulls import c_visual_hull, hull_domain, visual_hull
from .projections import ProjectionFamily, enumerate_family, positive_circular_projection
from .suites import inclusion_suite
from .tomo import (
    GROUPS,
    carve_reconstruct,
    check_group_equivalence,
    line_profiles,
    recover_rotation,
    supporting_centers,
    toward_body,
)

DEFAULT_H = 0.05
FAMILY_KINDS = {
    "orth": "AllOrthogonal",
    "circ-set": "CircularCentersOnSet",
    "circ-eps": "CircularEps",
    "circ-axis": "CircularAxis",
}
# witnesses singled out in classify reports for corpus bodies
ANCHORS = {"envelope": ENVELOPE_WITNESS}


# -- spec resolution ---------------------------------------------------------------
def _corpus_name(spec: str) -> str:
    return parse_spec(spec)[0] if spec else ""


def load_body(spec: str, h: float | None) -> GridBody:
    """A ``.gbody`` path, a corpus key (``envelope``) or ``generator:params``."""
    if not spec:
        raise ValidationError("a body spec is required")
    if spec.endswith(".gbody"):
        return GridBody.load(spec)
    name, params = parse_spec(spec)
    params = {k: (np.asarray(v, float) if isinstance(v, list) else v) for k, v in params.items()}
    try:
        entry = corpus_entry(name)
    except UnknownCorpusName:
        entry = None
    if entry is not None:
        merged = dict(entry.params)
        merged.update(params)
        return rasterize(generate(entry.name, **merged), entry.h if h is None else h)
    return rasterize(generate(name, **params), DEFAULT_H if h is None else h)


def build_family(spec: str, b: GridBody, seed: int) -> ProjectionFamily:
    name, p = parse_spec(spec)
    if name not in FAMILY_KINDS:
        raise ValidationError(f"unknown family {name!r}; known: {', '.join(FAMILY_KINDS)}")
    kind = FAMILY_KINDS[name]
    known = {"k", "N", "seed", "eps", "centers", "point", "dir", "span"}
    extra = set(p) - known
    if extra:
        raise ValidationError(f"unknown family parameters: {', '.join(sorted(extra))}")
    if "k" not in p:
        raise ValidationError("family spec needs k")
    kw = dict(kind=kind, k=int(p["k"]), n=b.n, count=int(p.get("N", 64)), seed=int(p.get("seed", seed)))
    if kind == "CircularEps":
        kw.update(body=b, eps=float(p.get("eps", 0)))
    elif kind == "CircularCentersOnSet":
        if "centers" not in p:
            raise ValidationError("circ-set needs centers=((x,y),...)")
        kw["centers"] = np.atleast_2d(np.asarray(p["centers"], float))
    elif kind == "CircularAxis":
        if "point" not in p or "dir" not in p:
            raise ValidationError("circ-axis needs point=(...) and dir=(...)")
        kw["axis"] = AffineSubspace(np.asarray(p["point"], float), np.atleast_2d(np.asarray(p["dir"], float)))
        if "span" in p:
            kw["span"] = tuple(float(v) for v in p["span"])
    return ProjectionFamily(**kw)


def _vec(text: str | None, n: int | None = None):
    if text is None:
        return None
    try:
        v = np.array([float(t) for t in text.replace("(", "").replace(")", "").split(",")])
    except ValueError as exc:
        raise ValidationError(f"bad vector {text!r}") from exc
    if n is not None and len(v) != n:
        raise ValidationError(f"vector {text!r} needs {n} coordinates")
    return v


def emit_pgm(data, path, axis: int = 2, index: int | None = None) -> Path:
    """PGM of a 2-D projection image or an axis-aligned slice of a grid body."""
    if isinstance(data, GridBody):
        occ = data.occupancy
        if occ.ndim == 3:
            if index is None:
                index = occ.shape[axis] // 2
            occ = np.take(occ, index, axis=axis)
        elif occ.ndim != 2:
            raise ValidationError("PGM export needs a 2-D body or a 3-D slice")
        return formats.write_pgm(path, occ)
    if hasattr(data, "save_pgm"):
        return data.save_pgm(path)
    return formats.write_pgm(path, np.asarray(data, bool))


# -- commands ------------------------------------------------------------------------
class Run:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.out = formats.ensure_dir(cfg.output)
        self.summary: list[str] = [f"command {cfg.command}"]
        self.status = 0

    def opt(self, key, default=None):
        return self.cfg.options.get(key, default)

    def tol(self, key, default):
        return type(default)(self.cfg.tolerances.get(key, default))

    def note(self, line: str):
        self.summary.append(line)

    def body(self, which: str = "body") -> GridBody:
        spec = self.cfg.body if which == "body" else self.cfg.body2
        h = float(self.opt("h_explicit")) if self.opt("h_explicit") else None
        return load_body(spec, h)

    def figure(self, fn, *args, **kw):
        if self.cfg.figures:
            fn(*args, **kw)

    # each command returns nothing and fills self.summary
    def generate(self):
        b = self.body()
        b.save(self.out / "body.gbody")
        emit_pgm(b, self.out / "body.pgm", index=self._slice_index(b))
        m = metrics(b)
        text = (f"n {b.n}\nh {b.h!r}\nshape {' '.join(map(str, b.shape))}\ncells {b.count}\n"
                f"volume {m.volume!r}\ndiameter {m.diameter!r}\ncomponents {m.component_count}\n"
                f"boundary_components {m.boundary_component_count}\n")
        formats.write_text(self.out / "body.report", text)
        self.figure(plotting.plot_body, b, self.out / "body.png", title=self.cfg.body)
        self.note(f"cells {b.count}")
        self.note(f"diameter {m.diameter:.6g}")

    def _slice_index(self, b: GridBody):
        if b.n != 3:
            return None
        if self.opt("slice") is not None:
            return int(self.opt("slice"))
        return int(np.argmax(b.occupancy.sum(axis=(0, 1))))

    def project(self):
        b = self.body()
        center = self.opt("center")
        if center is not None:
            C = _vec(center, b.n)
            prof = positive_circular_projection(C, b)
            formats.write_text(self.out / "positive.profile", prof.to_text())
            self.figure(plotting.plot_profiles, [prof], self.out / "positive.png", title="positive profile")
            self.note(f"positive profile bins {int(np.count_nonzero(prof.bins))}")
            return
        fam = build_family(self.cfg.family, b, self.cfg.stream_seed("family"))
        members = enumerate_family(fam)
        lines = []
        for i, f in enumerate(members):
            img = f.image(b)
            img.save(self.out / f"image_{i:04d}.gbody")
            if img.dim <= 2:
                img.save_pgm(self.out / f"image_{i:04d}.pgm")
            lines.append(f"member {i} cells {len(img.cells)} skipped {img.skipped} {f.describe()}")
        formats.write_text(self.out / "project.report", "\n".join(lines))
        self.note(f"members {len(members)}")

    def hull(self):
        b = self.body()
        fam = build_family(self.cfg.family, b, self.cfg.stream_seed("family"))
        tol = self.tol("image_cells", 1)
        margin = float(self.opt("margin")) if self.opt("margin") else None
        res = c_visual_hull(b, fam, tol, margin) if fam.circular else visual_hull(b, fam, tol, margin)
        H = res.hull.cropped()
        H.save(self.out / "hull.gbody", meta={"fixed_point": str(res.fixed_point).lower()})
        emit_pgm(H, self.out / "hull.pgm", index=self._slice_index(H))
        formats.write_text(self.out / "hull.witnesses", res.witness_log())
        centroid = H.occupied_centers().mean(axis=0)
        r_max = float(np.max(np.linalg.norm(H.occupied_centers() - centroid, axis=1)))
        extra = symmetric_difference_volume(H, b)
        text = (f"family {fam.kind}\nk {fam.k}\nmembers {len(res.members)}\ntol_cells {tol}\n"
                f"cells {H.count}\nvolume {H.volume!r}\nbody_volume {b.volume!r}\n"
                f"extra_volume {extra!r}\nfixed_point {str(res.fixed_point).lower()}\n"
                f"centroid {' '.join(repr(float(c)) for c in centroid)}\nmax_radius {r_max!r}\n")
        formats.write_text(self.out / "hull.report", text)
        self.figure(plotting.plot_hull, b, H, self.out / "hull.png", title=f"{fam.kind} hull")
        self.note(f"fixed_point={str(res.fixed_point).lower()}")
        self.note(f"hull cells {H.count} (body {b.count})")
        self.note(f"max_radius {r_max:.4f} about centroid")

    def classify(self):
        b = self.body()
        cid = self.opt("class")
        if cid not in CLASS_IDS:
            raise ValidationError(f"--class must be one of {', '.join(CLASS_IDS)}")
        if self.opt("k") is None:
            raise ValidationError("--k is required")
        k = int(self.opt("k"))
        eps = float(self.opt("eps")) if self.opt("eps") else None
        m = int(self.opt("m")) if self.opt("m") else None
        budget = SearchBudget(seed=self.cfg.stream_seed("classifiers"),
                              frames=int(self.opt("frames")) if self.opt("frames") else None,
                              max_boundary=int(self.opt("max_boundary", 2000)),
                              max_exterior=int(self.opt("max_exterior", 5000)))
        ctx = BodyContext(b)
        lines = []
        anchors = []
        if self.opt("witness"):
            anchors.append(_vec(self.opt("witness"), b.n))
        elif _corpus_name(self.cfg.body) in ANCHORS and b.n == 3:
            anchors.append(ANCHORS[_corpus_name(self.cfg.body)])
        for w in anchors:
            av = classify(b, cid, k, eps=eps, budget=budget, m=m, witnesses=[w], context=ctx)
            coords = " ".join(f"{c:.6f}" for c in w)
            lines.append(f"witness {coords} {av.verdict}")
            if cid in ("K1", "K2") and eps is None:
                mode = "supporting" if cid == "K1" else "disjoint"
                rv = ray_vertex_check(b, w, k, mode, context=ctx)
                lines.append(f"ray_vertex {coords} {str(rv).lower()}")
            self.note(f"witness ({coords}) {av.verdict}")
        v = classify(b, cid, k, eps=eps, budget=budget, m=m, context=ctx)
        formats.write_text(self.out / "classify.report", v.report() + "\n".join(lines))
        self.note(f"{cid} k={k} {v.verdict} ({v.witnesses_checked} witnesses)")

    def reconstruct(self):
        b = self.body()
        eps = float(self.opt("eps", 1.0))
        count = int(self.opt("count", 32))
        C = supporting_centers(b, eps, count, seed=self.cfg.stream_seed("tomo"))
        profs = line_profiles(b, C, toward_body(b, C))
        for i, (_, p) in enumerate(profs):
            formats.write_text(self.out / f"line_{i:04d}.profile", p.to_text())
        domain = hull_domain(b, 4 * b.h)
        rep = carve_reconstruct(profs, domain, truth=b)
        rep.reconstructed.save(self.out / "reconstruction.gbody")
        emit_pgm(rep.reconstructed, self.out / "reconstruction.pgm",
                 index=self._slice_index(rep.reconstructed))
        formats.write_text(self.out / "reconstruct.report", rep.to_text())
        self.figure(plotting.plot_hull, b, rep.reconstructed, self.out / "reconstruction.png",
                    title="carved reconstruction")
        self.note(f"profiles {count} match={str(rep.match).lower()} residual {rep.residual_volume:.6g}")

    def register(self):
        b1, b2 = self.body(), self.body("body2")
        group = self.opt("group", "translation")
        if group == "rotation":
            point = _vec(self.opt("axis_point"), b1.n)
            direction = _vec(self.opt("axis_dir"), b1.n)
            if point is None or direction is None:
                raise ValidationError("rotation needs --axis-point and --axis-dir")
            L = AffineSubspace(point, np.atleast_2d(direction))
            res = recover_rotation(b1, b2, L, n_centers=int(self.opt("centers", 8)))
        else:
            if group not in GROUPS:
                raise ValidationError(f"--group must be rotation or one of {', '.join(GROUPS)}")
            fam = build_family(self.cfg.family or f"orth:k={b1.n - 1},N=32", b1,
                               self.cfg.stream_seed("family"))
            res = check_group_equivalence(b1, b2, fam, group, tol_cells=self.tol("image_cells", 1))
        formats.write_text(self.out / "register.report", res.to_text())
        self.figure(plotting.plot_residuals, [float(r) for r in res.per_member_residuals],
                    self.out / "register.png", title=f"{group} residuals")
        par = " ".join(f"{float(v):.6g}" for v in np.atleast_1d(res.parameter))
        self.note(f"group {group} parameter {par} consistent={str(res.consistent).lower()}"
                  f" ambiguous={str(res.ambiguous).lower()}")

    def corpus(self):
        suite = self.opt("suite", "list")
        if suite == "list":
            lines = [f"{e.key} {e.name} h={e.h!r} " + ",".join(f"{k}={v}" for k, v in e.params)
                     for e in CORPUS]
            formats.write_text(self.out / "corpus.report", "\n".join(lines))
            self.summary.extend(lines)
            return
        if suite != "inclusions":
            raise ValidationError("--suite must be list or inclusions")
        keys = self.opt("only")
        entries = [corpus_entry(k) for k in keys.split(",")] if keys else list(CORPUS)
        budget = SearchBudget(seed=self.cfg.stream_seed("classifiers"))
        res = inclusion_suite(entries, budget=budget, workers=self.cfg.workers)
        formats.write_text(self.out / "inclusions.report", res.to_text())
        self.note(f"runs {len(res.rows)} violations {len(res.violations)}")
        self.summary.extend(res.violations)
        if not res.ok:
            self.status = 1


def run(cfg: RunConfig) -> int:
    """Execute ``cfg``; returns the exit status (errors propagate)."""
    r = Run(cfg)
    formats.write_text(r.out / "run.config", cfg.to_text())
    getattr(r, cfg.command)()
    formats.write_text(r.out / "summary.txt", "\n".join(r.summary))
    print("\n".join(r.summary))
    return r.status


# -- argument parsing ----------------------------------------------------------------
def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="circon", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, family=False):
        sp.add_argument("--body", default="")
        sp.add_argument("--h", type=float, default=None)
        sp.add_argument("--out", default="circon-out")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--no-figures", action="store_true")
        sp.add_argument("--slice", type=int, default=None, help="z index of the PGM slice for 3-D bodies")
        sp.add_argument("--tol", action="append", default=[], metavar="KEY=VALUE")
        sp.add_argument("--config", default=None, help="read the run from a saved run.config")
        if family:
            sp.add_argument("--family", default="")
        return sp

    common(sub.add_parser("generate", help="rasterize a corpus body"))
    sp = common(sub.add_parser("project", help="projection images or a positive profile"), True)
    sp.add_argument("--center", default=None)
    sp = common(sub.add_parser("hull", help="visual hull for a family"), True)
    sp.add_argument("--margin", type=float, default=None)
    sp = common(sub.add_parser("classify", help="class membership with certificates"))
    sp.add_argument("--class", dest="class_id", default=None)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--eps", type=float, default=None)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--witness", default=None)
    sp.add_argument("--frames", type=int, default=None)
    sp = common(sub.add_parser("reconstruct", help="carve a body from line profiles"))
    sp.add_argument("--eps", type=float, default=1.0)
    sp.add_argument("--count", type=int, default=32)
    sp = common(sub.add_parser("register", help="recover a group element between two bodies"), True)
    sp.add_argument("--body2", default="")
    sp.add_argument("--group", default="translation")
    sp.add_argument("--axis-point", default=None)
    sp.add_argument("--axis-dir", default=None)
    sp.add_argument("--centers", type=int, default=8)
    sp = common(sub.add_parser("corpus", help="corpus listing and regression suites"))
    sp.add_argument("--suite", default="list")
    sp.add_argument("--only", default=None, help="comma-separated corpus keys")
    return p


_OPTION_ARGS = ("class_id", "k", "eps", "m", "witness", "frames", "count", "group", "axis_point",
                "axis_dir", "centers", "suite", "only", "center", "margin", "slice")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    if ns.config:
        try:
            text = Path(ns.config).read_text()
        except OSError as exc:
            raise ValidationError(f"cannot read config {ns.config}: {exc}") from exc
        return RunConfig.from_text(text)
    options = {}
    for key in _OPTION_ARGS:
        val = getattr(ns, key, None)
        if val is not None:
            options["class" if key == "class_id" else key] = str(val)
    if ns.h is not None:
        options["h_explicit"] = repr(float(ns.h))
    tolerances = {}
    for item in ns.tol:
        key, eq, val = item.partition("=")
        if not eq:
            raise ValidationError(f"--tol needs KEY=VALUE, got {item!r}")
        tolerances[key] = val
    return RunConfig(
        command=ns.command,
        body=ns.body,
        body2=getattr(ns, "body2", ""),
        family=getattr(ns, "family", ""),
        h=ns.h if ns.h is not None else DEFAULT_H,
        output=ns.out,
        seed=ns.seed,
        workers=worker_count(ns.workers),
        figures=not ns.no_figures,
        options=options,
        tolerances=tolerances,
    )


def main(argv=None) -> int:
    ns = _parser().parse_args(argv)
    try:
        return run(config_from_args(ns))
    except ValidationError as exc:
        print(f"circon: invalid input: {exc}", file=sys.stderr)
        return 2
    except formats.IoError as exc:
        # an unwritable output path is a failed precondition, not a geometric error
        print(f"circon: {exc}", file=sys.stderr)
        return 2
    except CirconError as exc:
        print(f"circon: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"circon: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
