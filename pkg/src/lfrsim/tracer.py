"""Shooting-and-bouncing-ray tracer, coverage maps and point probes.

Rays leave the AP along a deterministic Fibonacci lattice. A coverage cell
collects every crossing of the measurement plane; a crossing at unfolded
distance ``d`` with plane cosine ``|cos|`` adds

    (lambda / (4 pi d))**2 * prod|gamma|**2 * 4 pi d**2 / (N * A_cell * |cos|)

which is unbiased because ``N * A_cell * |cos| / (4 pi d**2)`` lattice rays
cross the cell on average. The ``d`` factors cancel in the kernel.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence, Union

import numba
import numpy as np

from . import _kernels as K
from .geometry import Ray, Rect3, reflect_direction, vec
from .materials import Polarization, bounce_coefficient, complex_permittivity
from .scene import MeasurementPlane, Scene

MAX_BOUNCES = 5
MIN_AMPLITUDE = 1e-4
CAPTURE_RADIUS = 0.3
COS_FLOOR = 0.05
N_BATCHES = 64
NEIGHBORHOOD = 1  # 3x3 readout around a UE cell

_POL_CODE = {Polarization.TE: K.POL_TE, Polarization.TM: K.POL_TM, Polarization.UNPOLARIZED: K.POL_UNPOLARIZED}


class Terminal(str, Enum):
    REACHED_MAX_BOUNCES = "reached-max-bounces"
    ESCAPED = "escaped"
    ABSORBED = "absorbed"
    TARGET = "target"


def set_threads_from_env() -> None:
    """Honour ``APP_THREADS`` as a cap on numba worker threads."""
    cap = os.environ.get("APP_THREADS")
    if cap:
        n = max(1, min(int(cap), numba.config.NUMBA_NUM_THREADS))
        numba.set_num_threads(n)


@dataclass(frozen=True)
class PackedScene:
    """Flat arrays consumed by the compiled kernels.

    ``geo`` has one row per rectangle (walls first, then tiles):
    corner, edge_u, edge_v, unit normal, |edge_u|^2, |edge_v|^2. ``groups``
    has one row per reflector array: first row, end row, box lo, box hi.
    """

    geo: np.ndarray
    eta: np.ndarray
    n_walls: int
    groups: np.ndarray
    rects: tuple[Rect3, ...]

    def kernel_args(self):
        return self.geo, self.eta, self.n_walls, self.groups


def pack_scene(scene: Scene) -> PackedScene:
    rects = scene.all_rects()
    geo = np.zeros((len(rects), 14))
    eta = np.zeros(len(rects), dtype=np.complex128)
    perm = {}
    for k, r in enumerate(rects):
        geo[k, 0:3] = r.corner
        geo[k, 3:6] = r.edge_u
        geo[k, 6:9] = r.edge_v
        geo[k, 9:12] = r.normal
        geo[k, 12] = float(np.dot(r.edge_u, r.edge_u))
        geo[k, 13] = float(np.dot(r.edge_v, r.edge_v))
        if r.material_id not in perm:
            perm[r.material_id] = complex_permittivity(scene.materials[r.material_id], scene.frequency_ghz).value
        eta[k] = perm[r.material_id]
    groups = np.zeros((len(scene.arrays), 8))
    k = len(scene.surfaces)
    for g, arr in enumerate(scene.arrays):
        n = len(arr.tiles)
        pts = np.concatenate([r.corners() for r in rects[k : k + n]])
        groups[g, 0], groups[g, 1] = k, k + n
        groups[g, 2:5] = pts.min(axis=0) - 1e-6
        groups[g, 5:8] = pts.max(axis=0) + 1e-6
        k += n
    return PackedScene(geo, eta, len(scene.surfaces), groups, tuple(rects))


# ---------------------------------------------------------------- results


@dataclass(frozen=True)
class TracedPath:
    origin: tuple[float, float, float]
    bounce_points: tuple[tuple[float, float, float], ...]
    surface_ids: tuple[int, ...]
    coefficients: tuple[complex, ...]
    terminal: Terminal
    end: Optional[tuple[float, float, float]] = None

    @property
    def points(self) -> np.ndarray:
        pts = [self.origin, *self.bounce_points]
        if self.end is not None:
            pts.append(self.end)
        return np.array(pts, dtype=np.float64)

    @property
    def unfolded_length(self) -> float:
        """Total length of the polyline origin -> bounces (-> end)."""
        pts = self.points
        return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())

    @property
    def amplitude_product(self) -> complex:
        out = 1.0 + 0.0j
        for g in self.coefficients:
            out *= g
        return out


@dataclass
class CoverageMap:
    plane: MeasurementPlane
    cells: np.ndarray  # linear path gain, shape (ny, nx)
    ray_count: int

    def db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(self.cells)

    def gain_at(self, p: Sequence[float]) -> float:
        """Linear gain of the cell containing ``p`` (0 outside the grid)."""
        c = self.plane.cell_of(p)
        return 0.0 if c is None else float(self.cells[c])

    def neighborhood_max(self, p: Sequence[float], radius: int = NEIGHBORHOOD) -> float:
        c = self.plane.cell_of(p)
        if c is None:
            return 0.0
        iy, ix = c
        block = self.cells[max(0, iy - radius) : iy + radius + 1, max(0, ix - radius) : ix + radius + 1]
        return float(block.max())


@dataclass(frozen=True)
class PathGainResult:
    gain_db: float
    rss_dbm: float
    path_count: int


def to_db(x: float) -> float:
    return 10.0 * math.log10(x) if x > 0.0 else -math.inf


def friis_gain(distance: float, wavelength: float) -> float:
    """Free-space path gain ``(lambda / (4 pi d))**2`` between isotropic antennas."""
    return (wavelength / (4.0 * math.pi * distance)) ** 2


# ---------------------------------------------------------------- operations


def launch_directions(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("need at least one ray")
    return K.fib_lattice(int(n))


def trace(
    scene: Scene,
    ray: Ray,
    max_bounces: int = MAX_BOUNCES,
    min_amplitude: float = MIN_AMPLITUDE,
    polarization: Polarization | str = Polarization.TE,
    packed: Optional[PackedScene] = None,
) -> TracedPath:
    if max_bounces < 0:
        raise ValueError("max_bounces must be >= 0")
    pk = packed or pack_scene(scene)
    pol = Polarization(polarization)
    o, d = ray.origin, ray.direction
    pts, ids, cos_arr, nb_, end, status = K.trace_one(
        o[0], o[1], o[2], d[0], d[1], d[2], int(max_bounces), float(min_amplitude), _POL_CODE[pol],
        *pk.kernel_args(),
    )
    coeffs = tuple(
        bounce_coefficient(complex(pk.eta[ids[j]]), float(min(1.0, cos_arr[j])), pol)
        for j in range(nb_)
    )
    terminal = {0: Terminal.REACHED_MAX_BOUNCES, 1: Terminal.ESCAPED, 2: Terminal.ABSORBED}[int(status)]
    return TracedPath(
        origin=tuple(map(float, o)),
        bounce_points=tuple(tuple(map(float, pts[j])) for j in range(nb_)),
        surface_ids=tuple(int(i) for i in ids[:nb_]),
        coefficients=coeffs,
        terminal=terminal,
        end=tuple(map(float, end)) if status == 0 else None,
    )


def coverage_map(
    scene: Scene,
    n_rays: int,
    max_bounces: int = MAX_BOUNCES,
    min_amplitude: float = MIN_AMPLITUDE,
    polarization: Polarization | str = Polarization.TE,
    cos_floor: float = COS_FLOOR,
) -> CoverageMap:
    """Incoherent Monte Carlo path-gain map on the scene's measurement plane.

    Rays are split into a fixed number of contiguous batches, each with a
    private grid; grids are summed in batch order so the result does not
    depend on the thread count.
    """
    if n_rays < 1:
        raise ValueError("n_rays must be >= 1")
    pk = pack_scene(scene)
    plane = scene.measurement
    ny, nx = plane.shape
    n_batches = min(N_BATCHES, int(n_rays))
    out = np.zeros((n_batches, ny, nx))
    lam = scene.wavelength
    weight = lam * lam / (4.0 * math.pi * n_rays * plane.cell_size**2)
    ap = scene.ap
    K.coverage_kernel(
        int(n_rays), n_batches, ap[0], ap[1], ap[2], int(max_bounces), float(min_amplitude),
        _POL_CODE[Polarization(polarization)], *pk.kernel_args(),
        plane.height, plane.x_min, plane.y_min, plane.cell_size, weight, float(cos_floor), out,
    )
    cells = np.zeros((ny, nx))
    for b in range(n_batches):
        cells += out[b]
    return CoverageMap(plane, cells, int(n_rays))


def _mirror(p: np.ndarray, rect: Rect3) -> np.ndarray:
    n = rect.normal
    return p - 2.0 * float(np.dot(p - rect.corner, n)) * n


def _inside(p: np.ndarray, rect: Rect3, tol: float = 1e-9) -> bool:
    rel = p - rect.corner
    s = float(np.dot(rel, rect.edge_u)) / float(np.dot(rect.edge_u, rect.edge_u))
    w = float(np.dot(rel, rect.edge_v)) / float(np.dot(rect.edge_v, rect.edge_v))
    return -tol <= s <= 1.0 + tol and -tol <= w <= 1.0 + tol


def _blocked(p: np.ndarray, q: np.ndarray, pk: PackedScene) -> bool:
    seg = q - p
    length = float(np.linalg.norm(seg))
    if length <= 2 * K.HIT_EPS:
        return False
    d = seg / length
    t, _ = K.nearest_hit(pk.geo, pk.n_walls, pk.groups, p[0], p[1], p[2], d[0], d[1], d[2])
    return t < length - K.HIT_EPS


def image_path(
    scene: Scene,
    source: Sequence[float],
    target: Sequence[float],
    sequence: Sequence[int],
    polarization: Polarization | str = Polarization.TE,
    packed: Optional[PackedScene] = None,
) -> Optional[TracedPath]:
    """Exact specular path through ``sequence`` of surfaces, or ``None``.

    Images of the source are built across each surface plane, then the path
    is unfolded backwards from the target. It is rejected if a reflection
    point falls outside its rectangle, lies on the wrong side, or any leg is
    blocked.
    """
    pk = packed or pack_scene(scene)
    rects = pk.rects
    src, dst = vec(source), vec(target)
    images = [src]
    for k in sequence:
        images.append(_mirror(images[-1], rects[k]))
    pts = [dst]
    nxt = dst
    for j in range(len(sequence) - 1, -1, -1):
        rect = rects[sequence[j]]
        n = rect.normal
        img = images[j + 1]
        dirv = nxt - img
        denom = float(np.dot(dirv, n))
        if denom == 0.0:
            return None
        lam = float(np.dot(rect.corner - img, n)) / denom
        if not 0.0 < lam < 1.0:
            return None
        p = img + lam * dirv
        if not _inside(p, rect):
            return None
        pts.append(p)
        nxt = p
    pts.append(src)
    pts.reverse()  # src, bounce_1, ..., bounce_k, dst
    for a, b in zip(pts[:-1], pts[1:]):
        if _blocked(a, b, pk):
            return None
    pol = Polarization(polarization)
    coeffs = []
    for j, k in enumerate(sequence):
        rect = rects[k]
        n = rect.normal
        d_in = pts[j + 1] - pts[j]
        d_out = pts[j + 2] - pts[j + 1]
        # both legs must be on the same side of the reflecting plane
        if float(np.dot(d_in, n)) * float(np.dot(d_out, n)) >= 0.0:
            return None
        c = abs(float(np.dot(d_in, n))) / float(np.linalg.norm(d_in))
        coeffs.append(bounce_coefficient(complex(pk.eta[k]), min(1.0, c), pol))
    return TracedPath(
        origin=tuple(map(float, src)),
        bounce_points=tuple(tuple(map(float, p)) for p in pts[1:-1]),
        surface_ids=tuple(int(k) for k in sequence),
        coefficients=tuple(coeffs),
        terminal=Terminal.TARGET,
        end=tuple(map(float, dst)),
    )


def point_paths(
    scene: Scene,
    target: Sequence[float],
    capture_radius: float = CAPTURE_RADIUS,
    n_rays: int = 1_000_000,
    max_bounces: int = MAX_BOUNCES,
    min_amplitude: float = MIN_AMPLITUDE,
    polarization: Polarization | str = Polarization.TE,
    source: Optional[Sequence[float]] = None,
) -> list[TracedPath]:
    """Specular paths from the AP (or ``source``) to ``target``.

    Lattice rays passing within ``capture_radius`` of the target nominate
    surface sequences; each distinct sequence is solved exactly with the image
    method and kept only if that exact path exists. The radius must exceed
    the lattice spacing times the path length or paths can be missed.
    """
    if not capture_radius > 0:
        raise ValueError("capture_radius must be > 0")
    pk = pack_scene(scene)
    src = vec(scene.ap if source is None else source)
    tgt = vec(target)
    captured = np.zeros((n_rays, max_bounces + 1), dtype=np.uint8)
    seq = np.full((n_rays, max(1, max_bounces)), -1, dtype=np.int64)
    K.capture_kernel(
        int(n_rays), src[0], src[1], src[2], tgt[0], tgt[1], tgt[2], float(capture_radius),
        int(max_bounces), float(min_amplitude), _POL_CODE[Polarization(polarization)],
        *pk.kernel_args(), captured, seq,
    )
    rays, depth = np.nonzero(captured)
    if rays.size == 0:
        return []
    keys = seq[rays].copy()
    keys[np.arange(keys.shape[1])[None, :] >= depth[:, None]] = -1
    keys = np.column_stack([depth, keys])
    uniq = np.unique(keys, axis=0)  # sorted, hence deterministic
    out = []
    for row in uniq:
        k = int(row[0])
        path = image_path(scene, src, tgt, [int(x) for x in row[1 : 1 + k]], polarization, pk)
        if path is not None:
            out.append(path)
    out.sort(key=lambda p: (len(p.surface_ids), p.unfolded_length, p.surface_ids))
    return out


def _cancel_threshold(amps: np.ndarray, cycles: float) -> float:
    """Rounding level of a phasor sum.

    ``cycles`` is the largest path length in wavelengths; rounding of the
    lengths themselves leaves a phase error of about ``2 pi eps cycles``.
    """
    eps = np.finfo(float).eps
    return 8.0 * eps * (len(amps) + 2.0 * math.pi * cycles) * float(np.abs(amps).sum())


def point_rss(paths: Sequence[TracedPath], scene: Scene, mode: str = "incoherent") -> PathGainResult:
    """Path gain and RSS at a probe point from its path set.

    Coherent sums whose magnitude is at the rounding level of the summands
    are treated as exact cancellation (gain 0, -inf dB).
    """
    if mode not in ("coherent", "incoherent"):
        raise ValueError(f"unknown mode {mode!r}")
    if not paths:
        return PathGainResult(-math.inf, -math.inf, 0)
    lam = scene.wavelength
    amps = []
    cycles = max(p.unfolded_length for p in paths) / lam
    for p in paths:
        d = p.unfolded_length
        frac = math.fmod(d / lam, 1.0)
        phase = complex(math.cos(2.0 * math.pi * frac), -math.sin(2.0 * math.pi * frac))
        amps.append(lam / (4.0 * math.pi * d) * p.amplitude_product * phase)
    amps = np.asarray(amps, dtype=np.complex128)
    if mode == "incoherent":
        gain = float(np.sum(np.abs(amps) ** 2))
    else:
        total = complex(np.sum(amps))
        gain = 0.0 if abs(total) <= _cancel_threshold(amps, cycles) else abs(total) ** 2
    g_db = to_db(gain)
    return PathGainResult(g_db, scene.tx_power_dbm + g_db, len(paths))


RSS_COLUMNS = ("free_space", "none", "simple", "beamfocus")


def rss_sweep(
    configs: Sequence[tuple[str, Union[Scene, Callable[[int], Scene]]]],
    ue_indices: Optional[Sequence[int]] = None,
    mode: str = "incoherent",
    n_rays: int = 1_000_000,
    max_bounces: int = MAX_BOUNCES,
    capture_radius: float = CAPTURE_RADIUS,
) -> dict:
    """RSS table: one row per UE (1-based), a free-space column plus one per config.

    A config is either a fixed scene or a callable ``ue_index -> scene``, the
    latter for configurations re-focused on each location. The free-space
    column is the Friis gain over the direct AP-UE distance.
    """
    if not configs:
        raise ValueError("at least one configuration is required")

    def at(cfg, i):
        return cfg(i) if callable(cfg) else cfg

    base = at(configs[0][1], 1)
    idx = list(ue_indices) if ue_indices is not None else list(range(1, len(base.ue_positions) + 1))
    rows = []
    for i in idx:
        ue = base.ue_positions[i - 1]
        d = float(np.linalg.norm(np.subtract(ue, base.ap)))
        row = {"ue": i, "free_space": base.tx_power_dbm + to_db(friis_gain(d, base.wavelength))}
        for label, cfg in configs:
            sc = at(cfg, i)
            if sc.ue_positions != base.ue_positions or sc.ap != base.ap:
                raise ValueError(f"configuration {label!r} does not share the UE list and AP")
            paths = point_paths(sc, ue, capture_radius, n_rays, max_bounces)
            row[label] = point_rss(paths, sc, mode).rss_dbm
        rows.append(row)
    return {"columns": ["free_space", *[c[0] for c in configs]], "rows": rows}
