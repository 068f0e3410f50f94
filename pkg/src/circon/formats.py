"""Text-header + raw-byte grid files (``.gbody``), PGM export, text reports."""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .errors import CirconError, ValidationError

MAGIC = "GBODY 1"


class IoError(CirconError):
    exit_code = 3


def _fmt(values) -> str:
    return " ".join(repr(float(v)) for v in np.ravel(values))


def write_grid(path, occupancy: np.ndarray, origin, spacing: float, meta: dict | None = None) -> Path:
    """Write a boolean grid.  Floats are stored with ``repr`` so reads are bit-exact."""
    occ = np.ascontiguousarray(occupancy, dtype=np.uint8)
    lines = [
        MAGIC,
        f"n {occ.ndim}",
        "shape " + " ".join(str(s) for s in occ.shape),
        "origin " + _fmt(origin),
        "spacing " + repr(float(spacing)),
    ]
    for key, value in (meta or {}).items():
        if any(ch.isspace() for ch in key):
            raise ValidationError(f"meta key {key!r} contains whitespace")
        if isinstance(value, str):
            lines.append(f"meta.{key} {value}")
        else:
            lines.append(f"meta.{key} {_fmt(value)}")
    lines.append("data")
    path = Path(path)
    try:
        with open(path, "wb") as fh:
            fh.write(("\n".join(lines) + "\n").encode("ascii"))
            fh.write(occ.tobytes(order="C"))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    return path


def read_grid(path):
    """Return ``(occupancy, origin, spacing, meta)``; meta values are strings."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    header: dict[str, str] = {}
    pos = 0
    first = True
    while True:
        end = raw.index(b"\n", pos)
        line = raw[pos:end].decode("ascii")
        pos = end + 1
        if first:
            if line != MAGIC:
                raise IoError(f"{path}: not a grid file")
            first = False
            continue
        if line == "data":
            break
        key, _, value = line.partition(" ")
        header[key] = value
    shape = tuple(int(s) for s in header["shape"].split())
    if int(header["n"]) != len(shape):
        raise IoError(f"{path}: header dimension mismatch")
    data = np.frombuffer(raw[pos:], dtype=np.uint8)
    if data.size != int(np.prod(shape)):
        raise IoError(f"{path}: expected {int(np.prod(shape))} bytes, got {data.size}")
    occ = data.reshape(shape).astype(bool)
    origin = np.array([float(v) for v in header["origin"].split()])
    spacing = float(header["spacing"])
    meta = {k[5:]: v for k, v in header.items() if k.startswith("meta.")}
    return occ, origin, spacing, meta


def write_pgm(path, image2d: np.ndarray) -> Path:
    """Binary P5, occupied cells black (0), free cells white (255).

    Row 0 of the file is the top of the picture, i.e. the largest second
    coordinate of the grid.
    """
    img = np.asarray(image2d)
    if img.ndim != 2:
        raise ValidationError("PGM export needs 2-D data")
    pix = np.where(img.T[::-1], 0, 255).astype(np.uint8)
    h, w = pix.shape
    path = Path(path)
    try:
        with open(path, "wb") as fh:
            fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
            fh.write(pix.tobytes())
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    return path


def read_pgm(path) -> np.ndarray:
    """Inverse of :func:`write_pgm` (returns the boolean grid)."""
    raw = Path(path).read_bytes()
    parts = raw.split(maxsplit=4)
    if parts[0] != b"P5":
        raise IoError(f"{path}: not a P5 file")
    w, h = int(parts[1]), int(parts[2])
    header_len = len(f"P5\n{w} {h}\n255\n")
    pix = np.frombuffer(raw[header_len:], dtype=np.uint8).reshape(h, w)
    return (pix == 0)[::-1].T


def write_text(path, text: str) -> Path:
    path = Path(path)
    try:
        path.write_text(text if text.endswith("\n") else text + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    return path


def ensure_dir(path) -> Path:
    path = Path(path)
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {path}: {exc}") from exc
    return path
