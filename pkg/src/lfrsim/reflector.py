"""Tile orientation for the three reflector configurations.

* simple: every tile yawed about the world z-axis by the same angle;
* beamfocus: each tile normal bisects its directions to the AP and the UE;
* chained: two arrays, tile ``i`` of the first feeding tile ``i`` of the second.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .geometry import (
    DegenerateBisector,
    Rect3,
    bisector_normal,
    cartesian_to_spherical,
    reflect_direction,
    segment_blocked,
    vec,
    wrap_angle,
)
from .scene import ReflectorArray


class TileCountMismatch(ValueError):
    pass


class OccludedPair(ValueError):
    def __init__(self, index: int):
        super().__init__(f"segment between paired tiles {index} is occluded")
        self.index = index


class TileDegenerateBisector(DegenerateBisector):
    def __init__(self, index: int, message: str = ""):
        super().__init__(f"tile {index}: {message or 'degenerate bisector'}")
        self.index = index


def _angles(normal: np.ndarray) -> tuple[float, float]:
    _, th, ph = cartesian_to_spherical(normal)
    return th, ph


def configure_simple(array: ReflectorArray, yaw: float = np.pi / 4) -> ReflectorArray:
    """Yaw every tile by ``yaw`` about the world z-axis.

    The rotation composes with the current orientation, so two calls with
    ``pi/4`` equal one call with ``pi/2``.
    """
    return array.with_orientations((t.theta, wrap_angle(t.phi + yaw)) for t in array.tiles)


def _bisector_angles(centers: np.ndarray, src: Sequence[np.ndarray], dst: Sequence[np.ndarray]):
    out = []
    for k, a in enumerate(centers):
        try:
            n = bisector_normal(a, src[k], dst[k])
        except DegenerateBisector as exc:
            raise TileDegenerateBisector(k, str(exc)) from exc
        out.append(_angles(n))
    return out


def configure_beamfocus(array: ReflectorArray, ap, ue) -> ReflectorArray:
    ap, ue = vec(ap), vec(ue)
    centers = array.tile_centers
    n = len(centers)
    return array.with_orientations(_bisector_angles(centers, [ap] * n, [ue] * n))


def configure_chained(
    array1: ReflectorArray,
    array2: ReflectorArray,
    ap,
    ue,
    obstacles: Sequence[Rect3] = (),
) -> tuple[ReflectorArray, ReflectorArray]:
    """Route AP -> tile1[i] -> tile2[i] -> UE for every index ``i``.

    ``obstacles`` (normally the scene walls) are checked for each
    tile-to-tile segment.
    """
    if len(array1.tiles) != len(array2.tiles):
        raise TileCountMismatch(f"{len(array1.tiles)} tiles vs {len(array2.tiles)} tiles")
    ap, ue = vec(ap), vec(ue)
    c1 = array1.tile_centers
    c2 = array2.tile_centers
    for i, (p, q) in enumerate(zip(c1, c2)):
        if segment_blocked(p, q, obstacles):
            raise OccludedPair(i)
    n = len(c1)
    a1 = _bisector_angles(c1, [ap] * n, list(c2))
    a2 = _bisector_angles(c2, list(c1), [ue] * n)
    return array1.with_orientations(a1), array2.with_orientations(a2)


def forward_miss_distance(src, center, normal, target) -> float:
    """Distance from ``target`` to the ray ``src -> center`` reflected at ``center``."""
    src, center, target = vec(src), vec(center), vec(target)
    d = center - src
    d /= np.linalg.norm(d)
    r = reflect_direction(d, normal)
    w = target - center
    along = float(np.dot(w, r))
    if along <= 0.0:
        return float(np.linalg.norm(w))
    return float(np.linalg.norm(w - along * r))


def verify_beamfocus(array: ReflectorArray, ap, ue, tol: float = 1e-6) -> list[bool]:
    return [forward_miss_distance(ap, t.center, t.normal, ue) <= tol for t in array.tiles]


def verify_chained(array1: ReflectorArray, array2: ReflectorArray, ap, ue, tol: float = 1e-6) -> list[bool]:
    """Two-bounce forward trace per tile pair; both legs must land within ``tol``."""
    ok = []
    for t1, t2 in zip(array1.tiles, array2.tiles):
        first = forward_miss_distance(ap, t1.center, t1.normal, t2.center)
        d = vec(t1.center) - vec(ap)
        d /= np.linalg.norm(d)
        out = reflect_direction(d, t1.normal)
        # continue the first reflected ray from its closest approach to tile 2
        w = vec(t2.center) - vec(t1.center)
        hit = vec(t1.center) + float(np.dot(w, out)) * out
        r2 = reflect_direction(out, t2.normal)
        u = vec(ue) - hit
        along = float(np.dot(u, r2))
        second = float(np.linalg.norm(u - along * r2)) if along > 0 else float(np.linalg.norm(u))
        ok.append(first <= tol and second <= tol)
    return ok
