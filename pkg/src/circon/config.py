"""Run configuration: flat ``key = value`` sections, plus body/family spec strings.

Spec strings look like ``annulus:inner=2,outer=3`` or
``circ-eps:k=1,eps=1,N=256``; vector values are written in parentheses,
``blob:n=3,center=(1,0.3,0.2)``.
"""

from __future__ import annotations

import configparser
import io
import os
import zlib
from dataclasses import dataclass, field

import numpy as np

from .errors import BadParams, ValidationError

COMMANDS = ("generate", "project", "hull", "classify", "reconstruct", "register", "corpus")


def _split_top(text: str, sep: str = ","):
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if cur:
        parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def parse_value(text: str):
    t = text.strip()
    if t.startswith("(") and t.endswith(")"):
        return [parse_value(v) for v in _split_top(t[1:-1])]
    low = t.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        return t


def parse_spec(spec: str):
    """``name:key=value,...`` -> (name, params dict)."""
    if not spec or not spec.strip():
        raise BadParams("empty spec")
    name, _, rest = spec.partition(":")
    params = {}
    for item in _split_top(rest):
        key, eq, val = item.partition("=")
        if not eq or not key.strip():
            raise BadParams(f"malformed parameter {item!r} in {spec!r}")
        params[key.strip()] = parse_value(val)
    return name.strip(), params


@dataclass
class RunConfig:
    command: str
    body: str = ""
    body2: str = ""
    family: str = ""
    h: float = 0.05
    output: str = "out"
    seed: int = 0
    workers: int = 1
    figures: bool = True
    options: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        if not self.h > 0:
            raise ValidationError("h must be positive")
        if self.workers < 1:
            raise ValidationError("workers must be positive")

    def to_text(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        cp["run"] = {
            "command": self.command,
            "h": repr(float(self.h)),
            "output": self.output,
            "seed": str(int(self.seed)),
            "workers": str(int(self.workers)),
            "figures": str(bool(self.figures)).lower(),
        }
        cp["body"] = {"spec": self.body, "spec2": self.body2}
        cp["family"] = {"spec": self.family}
        cp["options"] = {k: str(v) for k, v in sorted(self.options.items())}
        cp["tolerances"] = {k: str(v) for k, v in sorted(self.tolerances.items())}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        try:
            cp.read_string(text)
            run = cp["run"]
            return cls(
                command=run["command"],
                body=cp.get("body", "spec", fallback=""),
                body2=cp.get("body", "spec2", fallback=""),
                family=cp.get("family", "spec", fallback=""),
                h=float(run["h"]),
                output=run.get("output", "out"),
                seed=int(run.get("seed", "0")),
                workers=int(run.get("workers", "1")),
                figures=run.get("figures", "true") == "true",
                options=dict(cp["options"]) if cp.has_section("options") else {},
                tolerances=dict(cp["tolerances"]) if cp.has_section("tolerances") else {},
            )
        except (KeyError, ValueError, configparser.Error) as exc:
            raise ValidationError(f"bad config: {exc}") from exc

    def stream_seed(self, name: str) -> int:
        return stream_seed_for(self.seed, name)


def stream_seed_for(seed: int, name: str) -> int:
    """Seed of the named random stream derived from a run seed."""
    ss = np.random.SeedSequence([int(seed), zlib.crc32(name.encode())])
    return int(ss.generate_state(1)[0])


def worker_count(default: int = 1) -> int:
    env = os.environ.get("CIRCON_WORKERS")
    if env is None:
        return default
    try:
        value = int(env)
    except ValueError as exc:
        raise ValidationError("CIRCON_WORKERS must be an integer") from exc
    if value < 1:
        raise ValidationError("CIRCON_WORKERS must be positive")
    return value


__all__ = ["COMMANDS", "RunConfig", "parse_spec", "parse_value", "stream_seed_for", "worker_count"]
