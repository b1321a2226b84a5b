"""Coverage-map and table file formats: dB grid CSV and PGM (P2) heatmaps."""

from __future__ import annotations

import csv
import io
import math
from typing import Sequence

import numpy as np

DB_WINDOW = (-160.0, -60.0)


def format_db(x: float) -> str:
    if x == -math.inf:
        return "-inf"
    return f"{x:.2f}"


def _parse_db(s: str) -> float:
    s = s.strip()
    return -math.inf if s == "-inf" else float(s)


def grid_to_csv(db: np.ndarray, x_centers: Sequence[float], y_centers: Sequence[float]) -> str:
    """Header row of x-centres, then one row per y-centre; cells in dB."""
    db = np.asarray(db)
    if db.shape != (len(y_centers), len(x_centers)):
        raise ValueError(f"grid shape {db.shape} does not match axes ({len(y_centers)}, {len(x_centers)})")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["y\\x", *(f"{x:.3f}" for x in x_centers)])
    for y, row in zip(y_centers, db):
        w.writerow([f"{y:.3f}", *(format_db(float(v)) for v in row)])
    return buf.getvalue()


def read_grid_csv(text: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Inverse of :func:`grid_to_csv`: returns ``(db, x_centers, y_centers)``."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or len(rows[0]) < 2:
        raise ValueError("empty grid CSV")
    xs = np.array([float(v) for v in rows[0][1:]])
    ys = np.array([float(r[0]) for r in rows[1:]])
    db = np.array([[_parse_db(v) for v in r[1:]] for r in rows[1:]], dtype=float).reshape(len(ys), len(xs))
    return db, xs, ys


def db_to_gray(db: np.ndarray, window: tuple[float, float] = DB_WINDOW) -> np.ndarray:
    """Linear map of ``window`` onto 0..255, clamping outside values."""
    lo, hi = window
    if not hi > lo:
        raise ValueError("dB window must be increasing")
    scaled = (np.asarray(db, dtype=float) - lo) / (hi - lo) * 255.0
    scaled = np.nan_to_num(scaled, nan=0.0, neginf=0.0, posinf=255.0)
    return np.clip(np.rint(scaled), 0, 255).astype(np.uint8)


def gray_to_pgm(gray: np.ndarray, comment: str = "") -> str:
    """Plain (P2) PGM. Row 0 of ``gray`` is written last so +y points up."""
    g = np.asarray(gray, dtype=np.uint8)
    h, w = g.shape
    lines = ["P2"]
    if comment:
        lines.append(f"# {comment}")
    lines += [f"{w} {h}", "255"]
    lines += [" ".join(str(int(v)) for v in row) for row in g[::-1]]
    return "\n".join(lines) + "\n"


def read_pgm(text: str) -> np.ndarray:
    """Parse a P2 PGM back into the row order given to :func:`gray_to_pgm`."""
    tokens = []
    for line in text.splitlines():
        tokens += line.split("#", 1)[0].split()
    if not tokens or tokens[0] != "P2":
        raise ValueError("not a plain PGM (P2) file")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    vals = np.array([int(t) for t in tokens[4:]], dtype=np.int64)
    if vals.size != w * h:
        raise ValueError(f"expected {w * h} samples, found {vals.size}")
    if vals.min(initial=0) < 0 or vals.max(initial=0) > maxval:
        raise ValueError("sample outside [0, maxval]")
    return vals.reshape(h, w)[::-1].astype(np.uint8)


def table_to_csv(columns: Sequence[str], rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["ue", *columns])
    for r in rows:
        w.writerow([r["ue"], *(format_db(float(r[c])) for c in columns)])
    return buf.getvalue()


def read_table_csv(text: str) -> tuple[list[str], list[dict]]:
    rows = list(csv.reader(io.StringIO(text)))
    cols = rows[0][1:]
    out = []
    for r in rows[1:]:
        d = {"ue": int(r[0])}
        d.update({c: _parse_db(v) for c, v in zip(cols, r[1:])})
        out.append(d)
    return cols, out
