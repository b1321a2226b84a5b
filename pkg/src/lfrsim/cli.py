"""Command-line front end: ``lfrsim {build,configure,coverage,rss}``.

Exit codes: 0 success, 2 usage or validation error, 1 internal error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import io as fio
from .reflector import configure_beamfocus, configure_chained, configure_simple
from .scene import (
    Scene,
    SceneError,
    build_hallway_L,
    build_hallway_T,
    parse_scene,
    serialize_scene,
)
from .tracer import (
    CAPTURE_RADIUS,
    MAX_BOUNCES,
    coverage_map,
    rss_sweep,
    set_threads_from_env,
    to_db,
)

MODES = ("none", "simple", "beamfocus", "chained")


class UsageError(Exception):
    """Bad input detected after argument parsing; maps to exit code 2."""


def _read_scene(path: str) -> Scene:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read scene {path!r}: {exc.strerror or exc}") from exc
    return parse_scene(text)


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path!r}: {exc.strerror or exc}") from exc


def apply_mode(scene: Scene, mode: str, ue_index: int = 9, yaw: float = math.pi / 4) -> Scene:
    """Return ``scene`` with its arrays configured for ``mode``.

    ``none`` removes the arrays altogether; ``beamfocus`` focuses every array
    independently on the UE; ``chained`` needs exactly two arrays.
    """
    if mode not in MODES:
        raise UsageError(f"unknown mode {mode!r}")
    if not 1 <= ue_index <= len(scene.ue_positions):
        raise UsageError(f"--ue must lie in [1, {len(scene.ue_positions)}], got {ue_index}")
    ue = scene.ue_positions[ue_index - 1]
    if mode == "none":
        return scene.with_arrays(())
    if not scene.arrays:
        raise UsageError(f"mode {mode!r} needs at least one reflector array")
    if mode == "simple":
        return scene.with_arrays([configure_simple(a, yaw) for a in scene.arrays])
    if mode == "beamfocus":
        return scene.with_arrays([configure_beamfocus(a, scene.ap, ue) for a in scene.arrays])
    if len(scene.arrays) != 2:
        raise UsageError(f"mode 'chained' needs exactly two arrays, scene has {len(scene.arrays)}")
    a1, a2 = configure_chained(scene.arrays[0], scene.arrays[1], scene.ap, ue, scene.surfaces)
    return scene.with_arrays((a1, a2))


def cmd_build(args) -> int:
    if args.shape == "L":
        kw = {"leg_length": args.leg}
        if args.bar is not None:
            raise UsageError("--bar applies to the T shape only")
    else:
        kw = {"stem_length": args.leg, "bar_length": args.bar}
    kw = {k: v for k, v in kw.items() if v is not None}
    for name in ("width", "height"):
        if getattr(args, name) is not None:
            kw[name] = getattr(args, name)
    if args.cell is not None:
        kw["cell_size"] = args.cell
    build = build_hallway_L if args.shape == "L" else build_hallway_T
    scene = build(**kw)
    _write(args.out, serialize_scene(scene))
    return 0


def cmd_configure(args) -> int:
    scene = _read_scene(args.scene)
    out = apply_mode(scene, args.mode, args.ue, args.yaw)
    _write(args.out, serialize_scene(out.validate()))
    return 0


def cmd_coverage(args) -> int:
    if args.rays < 1 or args.bounces < 0:
        raise UsageError("--rays must be >= 1 and --bounces >= 0")
    scene = _read_scene(args.scene)
    cmap = coverage_map(scene, args.rays, args.bounces, polarization=args.pol)
    db = cmap.db()
    plane = scene.measurement
    csv_text = fio.grid_to_csv(db, plane.x_centers(), plane.y_centers())
    _write(f"{args.out_prefix}.csv", csv_text)
    # shade from the rounded CSV values so the heatmap is reproducible from the CSV
    lo, hi = fio.DB_WINDOW
    gray = fio.db_to_gray(fio.read_grid_csv(csv_text)[0])
    _write(f"{args.out_prefix}.pgm", fio.gray_to_pgm(gray, f"path gain dB window [{lo:g}, {hi:g}]"))
    for i, ue in enumerate(scene.ue_positions, start=1):
        print(
            f"ue {i}: cell {fio.format_db(to_db(cmap.gain_at(ue)))} dB, "
            f"3x3 max {fio.format_db(to_db(cmap.neighborhood_max(ue)))} dB"
        )
    return 0


def _parse_ue_range(text: Optional[str], n: int) -> list[int]:
    if text is None:
        return list(range(1, n + 1))
    try:
        if "-" in text:
            a, b = (int(x) for x in text.split("-", 1))
            idx = list(range(a, b + 1))
        else:
            idx = [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad --ue-range {text!r}") from exc
    if not idx or min(idx) < 1 or max(idx) > n:
        raise UsageError(f"--ue-range must lie within 1..{n}")
    return idx


def cmd_rss(args) -> int:
    paths = [p for p in args.scenes.split(",") if p]
    if not paths:
        raise UsageError("--scenes needs at least one file")
    configs = []
    for p in paths:
        label = Path(p).name.split(".")[0]
        configs.append((label, _read_scene(p)))
    base = configs[0][1]
    for label, sc in configs[1:]:
        if len(sc.ue_positions) != len(base.ue_positions) or not np.allclose(sc.ue_positions, base.ue_positions):
            raise UsageError(f"scene {label!r} has a different UE list")
        if not np.allclose(sc.ap, base.ap):
            raise UsageError(f"scene {label!r} has a different AP position")
    labels = [c[0] for c in configs]
    if len(set(labels)) != len(labels):
        raise UsageError("scene file names must be distinct (they label the columns)")
    refocus = {}
    for item in args.refocus or ():
        label, _, mode = item.partition("=")
        if label not in labels or mode not in ("beamfocus", "chained"):
            raise UsageError(f"bad --refocus {item!r}; expected LABEL=beamfocus|chained with a known label")
        refocus[label] = mode
    configs = [
        (label, (lambda i, sc=sc, m=refocus[label]: apply_mode(sc, m, i)) if label in refocus else sc)
        for label, sc in configs
    ]
    idx = _parse_ue_range(args.ue_range, len(base.ue_positions))
    table = rss_sweep(configs, idx, args.mode, args.rays, args.bounces, args.capture_radius)
    _write(args.out, fio.table_to_csv(table["columns"], table["rows"]))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lfrsim", description="Specular ray tracing with LFR reflector arrays.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="write a canonical hallway scene")
    b.add_argument("shape", choices=("L", "T"))
    b.add_argument("--leg", type=float, help="leg length (L) or stem length (T), metres")
    b.add_argument("--bar", type=float, help="bar length of the T, metres")
    b.add_argument("--width", type=float)
    b.add_argument("--height", type=float)
    b.add_argument("--cell", type=float, help="coverage cell size, metres")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("configure", help="orient reflector tiles")
    c.add_argument("--scene", required=True)
    c.add_argument("--mode", required=True, choices=MODES)
    c.add_argument("--ue", type=int, default=9, help="1-based UE index to focus on (default 9)")
    c.add_argument("--yaw", type=float, default=math.pi / 4, help="simple-mode yaw, radians")
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_configure)

    v = sub.add_parser("coverage", help="incoherent path-gain map (CSV + PGM)")
    v.add_argument("--scene", required=True)
    v.add_argument("--rays", type=int, default=2_000_000)
    v.add_argument("--bounces", type=int, default=MAX_BOUNCES)
    v.add_argument("--pol", choices=("te", "tm", "unpolarized"), default="te")
    v.add_argument("--out-prefix", required=True)
    v.set_defaults(func=cmd_coverage)

    r = sub.add_parser("rss", help="RSS table at the UE positions")
    r.add_argument("--scenes", required=True, help="comma-separated scene files")
    r.add_argument("--mode", choices=("coherent", "incoherent"), default="incoherent")
    r.add_argument("--ue-range", help="e.g. 1-9 or 2,5")
    r.add_argument(
        "--refocus",
        action="append",
        metavar="LABEL=MODE",
        help="re-configure that scene's arrays for each UE (MODE: beamfocus or chained)",
    )
    r.add_argument("--rays", type=int, default=1_000_000)
    r.add_argument("--bounces", type=int, default=MAX_BOUNCES)
    r.add_argument("--capture-radius", type=float, default=CAPTURE_RADIUS)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_rss)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # argparse exits 2 on usage errors
    try:
        set_threads_from_env()
    except ValueError:
        print("error: APP_THREADS must be an integer", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (UsageError, SceneError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
