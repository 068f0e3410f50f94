"""Corpus-wide regression suites shared by the CLI and the acceptance tests."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .classifiers import CLASS_IDS, BodyContext, SearchBudget, classify
from .corpus import CORPUS, CorpusEntry

# (stronger, weaker): membership in the first must imply membership in the second
INCLUSIONS = (
    ("K2", "K1"), ("V2", "V1"), ("V1", "K1"), ("V2", "K2"),
    ("K1", "K1w"), ("K2", "K2w"), ("K2w", "K1w"),
    ("V2w", "V1w"), ("V1w", "K1w"), ("V2w", "K2w"),
    ("Keps2", "Keps1"), ("Veps2", "Veps1"), ("Veps1", "Keps1"), ("Veps2", "Keps2"),
)


@dataclass
class SuiteRow:
    key: str
    class_id: str
    k: int
    eps: float | None
    m: int | None
    verdict: str
    seconds: float

    def line(self) -> str:
        e = "-" if self.eps is None else repr(float(self.eps))
        m = "-" if self.m is None else str(self.m)
        return f"{self.key} {self.class_id} k={self.k} eps={e} m={m} {self.verdict}"


@dataclass
class SuiteResult:
    rows: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_text(self) -> str:
        out = [r.line() for r in self.rows]
        out += [f"violation {v}" for v in self.violations]
        out.append(f"violations {len(self.violations)}")
        return "\n".join(out) + "\n"


def _runs(n: int, eps_values):
    """(class_id, k, eps, m) tuples tested for an n-dimensional body."""
    runs = []
    for k in range(1, n):
        for cid in CLASS_IDS:
            if "eps" in cid:
                continue
            runs.append((cid, k, None, None))
            if cid.startswith("V") and k > 1:
                runs.append((cid, k, None, 1))
    for eps in eps_values:
        for k in range(0, n):
            for cid in ("Keps1", "Keps2", "Veps1", "Veps2"):
                if cid.startswith("V") and k == 0:
                    continue
                runs.append((cid, k, eps, None))
    return runs


def _entry_rows(entry: CorpusEntry, eps_values, budget) -> list:
    b = entry.grid()
    ctx = BodyContext(b)
    rows = []
    for cid, k, eps, m in _runs(b.n, eps_values):
        t0 = time.perf_counter()
        v = classify(b, cid, k, eps=eps, budget=budget, m=m, context=ctx)
        rows.append(SuiteRow(entry.key, cid, k, eps, m, v.verdict, time.perf_counter() - t0))
    return rows


def _class_verdicts(verdict: dict) -> dict:
    """Verdict per (key, class, k, eps) with V-classes required to hold for every tested m."""
    out = {}
    for (key, cid, k, eps, m), v in verdict.items():
        slot = (key, cid, k, eps)
        if v != "MEMBER" and out.get(slot, "MEMBER") == "MEMBER":
            out[slot] = v
        else:
            out.setdefault(slot, v)
    return out


def check_inclusions(rows) -> list:
    """Inclusion violations among suite rows.

    Between two V-classes the comparison is made per ``m``.  Against a
    K-class the V-class counts as a member only when every tested ``m``
    is, since the m < k conditions are vacuous at boundary points with no
    supporting plane of dimension k - m.
    """
    verdict = {(r.key, r.class_id, r.k, r.eps, r.m): r.verdict for r in rows}
    whole = _class_verdicts(verdict)
    bad = []
    for (key, cid, k, eps, m), v in sorted(verdict.items(), key=lambda t: str(t[0])):
        for strong, weak in INCLUSIONS:
            if cid != strong:
                continue
            if weak.startswith("V"):
                if v != "MEMBER":
                    continue
                other = verdict.get((key, weak, k, eps, m))
                tag = f"m={m}"
            else:
                if m is not None or whole.get((key, cid, k, eps)) != "MEMBER":
                    continue
                other = verdict.get((key, weak, k, eps, None))
                tag = "all m" if strong.startswith("V") else f"m={m}"
            if other is not None and other != "MEMBER":
                bad.append(f"{key} k={k} eps={eps} {tag}: {strong} MEMBER but {weak} {other}")
    return bad


def inclusion_suite(entries=CORPUS, eps_values=(1.0,), budget: SearchBudget | None = None,
                    workers: int = 1) -> SuiteResult:
    """Classify every entry into every class and check the inclusion relations."""
    budget = budget if budget is not None else SearchBudget()
    entries = list(entries)
    if workers > 1 and len(entries) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_entry_rows, entries, [eps_values] * len(entries),
                                  [budget] * len(entries)))
    else:
        parts = [_entry_rows(e, eps_values, budget) for e in entries]
    rows = [r for p in parts for r in p]
    return SuiteResult(rows, check_inclusions(rows))


__all__ = ["INCLUSIONS", "SuiteRow", "SuiteResult", "check_inclusions", "inclusion_suite"]
