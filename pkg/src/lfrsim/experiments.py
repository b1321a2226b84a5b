"""Reusable experiment drivers behind the scripts in ``scripts/``.

Each experiment takes a frozen dataclass config and returns plain rows, so
results can be printed, written to CSV or asserted on.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from .reflector import configure_beamfocus, configure_chained, configure_simple
from .scene import Scene, build_hallway_L, build_hallway_T
from .tracer import MAX_BOUNCES, coverage_map, rss_sweep, to_db


@dataclass(frozen=True)
class OrderingConfig:
    hallway: str = "L"  # "L" or "T"
    n_rays: int = 4_000_000
    max_bounces: int = MAX_BOUNCES
    ue_indices: tuple[int, ...] = tuple(range(1, 10))


@dataclass(frozen=True)
class ConvergenceConfig:
    hallway: str = "T"
    ue_index: int = 9
    ray_counts: tuple[int, ...] = (1_000_000, 2_000_000, 4_000_000, 8_000_000, 16_000_000)


@dataclass(frozen=True)
class RssConfig:
    hallway: str = "L"
    mode: str = "incoherent"
    n_rays: int = 1_000_000
    ue_indices: tuple[int, ...] = field(default_factory=lambda: tuple(range(1, 10)))


def build(hallway: str) -> Scene:
    if hallway == "L":
        return build_hallway_L()
    if hallway == "T":
        return build_hallway_T()
    raise ValueError(f"unknown hallway {hallway!r}")


def focused_label(scene: Scene) -> str:
    return "chained" if len(scene.arrays) == 2 else "beamfocus"


def configurations(scene: Scene, ue_index: int) -> dict[str, Scene]:
    """The three sub-cases: no reflector, simple yaw, and focused on one UE.

    A two-array scene is focused by chaining the arrays.
    """
    ue = scene.ue_positions[ue_index - 1]
    if len(scene.arrays) == 2:
        focused = scene.with_arrays(configure_chained(*scene.arrays, scene.ap, ue, scene.surfaces))
    else:
        focused = scene.with_arrays([configure_beamfocus(a, scene.ap, ue) for a in scene.arrays])
    return {
        "none": scene.with_arrays(()),
        "simple": scene.with_arrays([configure_simple(a) for a in scene.arrays]),
        focused_label(scene): focused,
    }


def ordering(cfg: OrderingConfig) -> list[dict]:
    """Path gain at each UE for the three sub-cases (focus re-aimed per UE).

    The none and simple maps do not depend on the UE and are traced once.
    """
    scene = build(cfg.hallway)
    label = focused_label(scene)
    base = configurations(scene, 1)
    fixed = {k: coverage_map(base[k], cfg.n_rays, cfg.max_bounces) for k in ("none", "simple")}
    rows = []
    for i in cfg.ue_indices:
        t0 = time.perf_counter()
        focused = coverage_map(configurations(scene, i)[label], cfg.n_rays, cfg.max_bounces)
        ue = scene.ue_positions[i - 1]
        row = {"ue": i}
        for name, m in (*fixed.items(), (label, focused)):
            row[f"{name}_cell"] = to_db(m.gain_at(ue))
            row[f"{name}_3x3"] = to_db(m.neighborhood_max(ue))
        row["seconds"] = time.perf_counter() - t0
        rows.append(row)
    return rows


def convergence(cfg: ConvergenceConfig) -> list[dict]:
    """Readouts at one UE against the ray count, simple vs focused."""
    scene = build(cfg.hallway)
    label = focused_label(scene)
    confs = configurations(scene, cfg.ue_index)
    ue = scene.ue_positions[cfg.ue_index - 1]
    rows = []
    for n in cfg.ray_counts:
        row = {"n_rays": n}
        for name in ("simple", label):
            m = coverage_map(confs[name], n)
            row[f"{name}_cell"] = to_db(m.gain_at(ue))
            row[f"{name}_3x3"] = to_db(m.neighborhood_max(ue))
        row["gap_3x3"] = row[f"{label}_3x3"] - row["simple_3x3"]
        rows.append(row)
    return rows


def rss(cfg: RssConfig) -> dict:
    """RSS table with the focused configuration re-aimed at each UE."""
    scene = build(cfg.hallway)
    label = focused_label(scene)
    base = configurations(scene, 1)
    configs = [
        ("none", base["none"]),
        ("simple", base["simple"]),
        (label, lambda i: configurations(scene, i)[label]),
    ]
    return rss_sweep(configs, cfg.ue_indices, cfg.mode, cfg.n_rays)


def format_rows(rows: list[dict]) -> str:
    if not rows:
        return ""
    cols = list(rows[0])
    out = ["  ".join(f"{c:>14}" for c in cols)]
    for r in rows:
        cells = []
        for c in cols:
            v = r[c]
            if isinstance(v, float):
                cells.append(f"{'-inf' if v == -math.inf else f'{v:.2f}':>14}")
            else:
                cells.append(f"{v:>14}")
        out.append("  ".join(cells))
    return "\n".join(out)
