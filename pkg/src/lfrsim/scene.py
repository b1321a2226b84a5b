"""Scene data model, JSON scene files and the hallway / reflector builders."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Mapping, Optional, Sequence

import numpy as np

from .geometry import (
    Rect3,
    Vector,
    cartesian_to_spherical,
    normalize,
    spherical_to_cartesian,
    tile_rotation,
    vec,
)
from .materials import BUILTIN_MATERIALS, MaterialSpec

DEFAULT_FREQUENCY_GHZ = 28.0
DEFAULT_TX_POWER_DBM = 40.0  # 10 W
MEASUREMENT_HEIGHT = 1.5
DEFAULT_CELL = 0.25
MOUNT_OFFSET = 0.15  # array plane distance from its wall; > tile half-diagonal


class SceneError(ValueError):
    pass


class SchemaError(SceneError):
    """Missing, unknown or ill-typed field. ``path`` locates it in the document."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class ValidationError(SceneError):
    pass


class ParamError(SceneError):
    pass


# ---------------------------------------------------------------- data types


@dataclass(frozen=True)
class Tile:
    center: tuple[float, float, float]
    half_size: float
    theta: float
    phi: float
    material_id: str = "metal"

    @property
    def normal(self) -> Vector:
        return tile_rotation(self.theta, self.phi)[:, 2].copy()

    def rect(self) -> Rect3:
        r = tile_rotation(self.theta, self.phi)
        h = self.half_size
        c = np.asarray(self.center)
        return Rect3(
            corner=c + r @ np.array([-h, -h, 0.0]),
            edge_u=r @ np.array([2.0 * h, 0.0, 0.0]),
            edge_v=r @ np.array([0.0, 2.0 * h, 0.0]),
            material_id=self.material_id,
        )

    def corners(self) -> np.ndarray:
        return self.rect().corners()


def array_axes(normal: Sequence[float]) -> tuple[Vector, Vector]:
    """In-plane (column, row) unit axes of an array mounted with ``normal``.

    Columns run horizontally and rows vertically on a wall; a floor or
    ceiling mount uses the x-axis for columns.
    """
    n = normalize(normal)
    u = np.cross([0.0, 0.0, 1.0], n)
    if np.linalg.norm(u) < 1e-9:
        u = np.array([1.0, 0.0, 0.0])
    u = normalize(u)
    return u, np.cross(n, u)


@dataclass(frozen=True)
class ReflectorArray:
    origin: tuple[float, float, float]
    mounting_normal: tuple[float, float, float]
    rows: int
    cols: int
    tile_size: float
    pitch: float
    material_id: str
    tiles: tuple[Tile, ...]

    def __post_init__(self):
        if len(self.tiles) != self.rows * self.cols:
            raise ValidationError(
                f"array has {len(self.tiles)} tiles, expected rows*cols = {self.rows * self.cols}"
            )

    @property
    def tile_centers(self) -> np.ndarray:
        return np.array([t.center for t in self.tiles])

    def with_orientations(self, angles: Iterable[tuple[float, float]]) -> "ReflectorArray":
        tiles = tuple(replace(t, theta=float(th), phi=float(ph)) for t, (th, ph) in zip(self.tiles, angles))
        if len(tiles) != len(self.tiles):
            raise ValueError("one orientation per tile required")
        return replace(self, tiles=tiles)

    def flush(self) -> "ReflectorArray":
        _, th, ph = cartesian_to_spherical(self.mounting_normal)
        return self.with_orientations([(th, ph)] * len(self.tiles))

    def rects(self) -> list[Rect3]:
        return [t.rect() for t in self.tiles]


@dataclass(frozen=True)
class MeasurementPlane:
    height: float = MEASUREMENT_HEIGHT
    cell_size: float = DEFAULT_CELL
    x_min: float = 0.0
    x_max: float = 1.0
    y_min: float = 0.0
    y_max: float = 1.0

    @property
    def shape(self) -> tuple[int, int]:
        """Grid shape as (rows along y, cols along x)."""
        ny = max(1, math.ceil((self.y_max - self.y_min) / self.cell_size - 1e-9))
        nx = max(1, math.ceil((self.x_max - self.x_min) / self.cell_size - 1e-9))
        return ny, nx

    def x_centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.shape[1]) + 0.5) * self.cell_size

    def y_centers(self) -> np.ndarray:
        return self.y_min + (np.arange(self.shape[0]) + 0.5) * self.cell_size

    def cell_of(self, p: Sequence[float]) -> Optional[tuple[int, int]]:
        ny, nx = self.shape
        ix = math.floor((p[0] - self.x_min) / self.cell_size)
        iy = math.floor((p[1] - self.y_min) / self.cell_size)
        if 0 <= ix < nx and 0 <= iy < ny:
            return iy, ix
        return None


@dataclass(frozen=True)
class Scene:
    frequency_ghz: float
    surfaces: tuple[Rect3, ...]
    arrays: tuple[ReflectorArray, ...]
    ap: tuple[float, float, float]
    ue_positions: tuple[tuple[float, float, float], ...]
    measurement: MeasurementPlane
    tx_power_dbm: float = DEFAULT_TX_POWER_DBM
    materials: Mapping[str, MaterialSpec] = field(default_factory=lambda: dict(BUILTIN_MATERIALS))

    @property
    def wavelength(self) -> float:
        return 299_792_458.0 / (self.frequency_ghz * 1e9)

    def all_rects(self) -> list[Rect3]:
        """Walls first, then every tile of every array in order."""
        rects = list(self.surfaces)
        for arr in self.arrays:
            rects.extend(arr.rects())
        return rects

    def surface_labels(self) -> list[str]:
        labels = [f"wall{i}" for i in range(len(self.surfaces))]
        for a, arr in enumerate(self.arrays):
            labels.extend(f"array{a}.tile{k}" for k in range(len(arr.tiles)))
        return labels

    def with_arrays(self, arrays: Sequence[ReflectorArray]) -> "Scene":
        return replace(self, arrays=tuple(arrays))

    def validate(self) -> "Scene":
        f = self.frequency_ghz
        if not (isinstance(f, (int, float)) and f > 0 and math.isfinite(f)):
            raise ValidationError(f"frequency must be a positive number, got {f}")
        used = {s.material_id for s in self.surfaces}
        for arr in self.arrays:
            used.add(arr.material_id)
            used.update(t.material_id for t in arr.tiles)
        for name in sorted(used):
            if name not in self.materials:
                raise ValidationError(f"unknown material {name!r}")
            m = self.materials[name]
            if not m.f_min_ghz <= f <= m.f_max_ghz:
                raise ValidationError(
                    f"frequency {f} GHz outside the validity range "
                    f"[{m.f_min_ghz}, {m.f_max_ghz}] GHz of material {name!r}"
                )
        for i, arr in enumerate(self.arrays):
            if arr.rows < 1 or arr.cols < 1:
                raise ValidationError(f"array {i}: rows and cols must be >= 1")
            if not (arr.tile_size > 0 and arr.pitch > 0):
                raise ValidationError(f"array {i}: tile size and pitch must be > 0")
            for k, t in enumerate(arr.tiles):
                if not (0.0 <= t.theta <= math.pi and -math.pi < t.phi <= math.pi):
                    raise ValidationError(f"array {i} tile {k}: orientation angles out of range")
        if self.surfaces:
            pts = np.concatenate([r.corners() for r in self.surfaces])
            lo, hi = pts.min(axis=0), pts.max(axis=0)
            for label, p in [("ap", self.ap)] + [(f"ue[{k}]", u) for k, u in enumerate(self.ue_positions)]:
                if not (np.all(np.asarray(p) > lo) and np.all(np.asarray(p) < hi)):
                    raise ValidationError(f"{label} {tuple(p)} is not strictly inside the enclosure")
        m = self.measurement
        if not m.cell_size > 0:
            raise ValidationError("measurement cell size must be > 0")
        if not (m.x_max > m.x_min and m.y_max > m.y_min):
            raise ValidationError("measurement extent is empty")
        for k, u in enumerate(self.ue_positions):
            if not (m.x_min <= u[0] <= m.x_max and m.y_min <= u[1] <= m.y_max):
                raise ValidationError(f"ue[{k}] lies outside the measurement extent")
        return self


# ---------------------------------------------------------------- JSON format

_TOP_FIELDS = {"frequency_ghz", "tx_power_dbm", "materials", "surfaces", "arrays", "ap", "ue", "measurement"}
_MATERIAL_FIELDS = {"a", "b", "c", "d", "f_min_ghz", "f_max_ghz"}
_SURFACE_FIELDS = {"corner", "edge_u", "edge_v", "material"}
_ARRAY_FIELDS = {"origin", "normal", "rows", "cols", "tile_m", "pitch_m", "material", "tiles"}
_TILE_FIELDS = {"theta_rad", "phi_rad"}
_MEAS_FIELDS = {"height_m", "cell_m", "x_min", "x_max", "y_min", "y_max"}


def _fields(obj: Any, path: str, required: set, optional: set = frozenset()) -> dict:
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    unknown = set(obj) - required - optional
    if unknown:
        raise SchemaError(f"{path}.{sorted(unknown)[0]}", "unknown field")
    for k in sorted(required):
        if k not in obj:
            raise SchemaError(f"{path}.{k}", "missing field")
    return obj


def _num(x: Any, path: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SchemaError(path, f"expected a number, got {type(x).__name__}")
    if not math.isfinite(x):
        raise SchemaError(path, "number must be finite")
    return float(x)


def _int(x: Any, path: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise SchemaError(path, f"expected an integer, got {type(x).__name__}")
    return x


def _str(x: Any, path: str) -> str:
    if not isinstance(x, str):
        raise SchemaError(path, f"expected a string, got {type(x).__name__}")
    return x


def _vec3(x: Any, path: str) -> tuple[float, float, float]:
    if not isinstance(x, list) or len(x) != 3:
        raise SchemaError(path, "expected [x, y, z]")
    return tuple(_num(v, f"{path}[{i}]") for i, v in enumerate(x))  # type: ignore[return-value]


def make_array(
    origin: Sequence[float],
    mounting_normal: Sequence[float],
    rows: int = 10,
    cols: int = 7,
    tile_size: float = 0.2,
    pitch: float = 0.2,
    material_id: str = "metal",
    orientations: Optional[Sequence[tuple[float, float]]] = None,
) -> ReflectorArray:
    """Regular ``rows x cols`` tile grid centred on ``origin``, tiles flush by default.

    Tile ``k`` sits at row ``k // cols`` and column ``k % cols``.
    """
    if isinstance(rows, bool) or isinstance(cols, bool) or rows < 1 or cols < 1:
        raise ParamError("rows and cols must be >= 1")
    if not (tile_size > 0 and pitch > 0):
        raise ParamError("tile size and pitch must be > 0")
    o = vec(origin)
    n = normalize(mounting_normal)
    u, v = array_axes(n)
    _, th0, ph0 = cartesian_to_spherical(n)
    if orientations is None:
        orientations = [(th0, ph0)] * (rows * cols)
    elif len(orientations) != rows * cols:
        raise ValidationError(f"expected {rows * cols} tile orientations, got {len(orientations)}")
    tiles = []
    for i in range(rows):
        for j in range(cols):
            c = o + (j - (cols - 1) / 2.0) * pitch * u + (i - (rows - 1) / 2.0) * pitch * v
            th, ph = orientations[i * cols + j]
            tiles.append(Tile(tuple(float(x) for x in c), tile_size / 2.0, float(th), float(ph), material_id))
    return ReflectorArray(
        origin=tuple(float(x) for x in o),
        mounting_normal=tuple(float(x) for x in n),
        rows=rows,
        cols=cols,
        tile_size=float(tile_size),
        pitch=float(pitch),
        material_id=material_id,
        tiles=tuple(tiles),
    )


build_array = make_array


def scene_from_dict(doc: Any) -> Scene:
    doc = _fields(doc, "$", _TOP_FIELDS - {"arrays", "materials", "tx_power_dbm"}, {"arrays", "materials", "tx_power_dbm"})
    materials = dict(BUILTIN_MATERIALS)
    mats = doc.get("materials", {})
    if not isinstance(mats, dict):
        raise SchemaError("$.materials", "expected an object")
    for name in sorted(mats):
        p = f"$.materials.{name}"
        m = _fields(mats[name], p, _MATERIAL_FIELDS)
        try:
            materials[name] = MaterialSpec(name, **{k: _num(m[k], f"{p}.{k}") for k in sorted(_MATERIAL_FIELDS)})
        except ValueError as exc:
            if isinstance(exc, SceneError):
                raise
            raise ValidationError(str(exc)) from exc

    surfaces_doc = doc["surfaces"]
    if not isinstance(surfaces_doc, list):
        raise SchemaError("$.surfaces", "expected an array")
    surfaces = []
    for i, s in enumerate(surfaces_doc):
        p = f"$.surfaces[{i}]"
        s = _fields(s, p, _SURFACE_FIELDS)
        try:
            surfaces.append(
                Rect3(
                    _vec3(s["corner"], p + ".corner"),
                    _vec3(s["edge_u"], p + ".edge_u"),
                    _vec3(s["edge_v"], p + ".edge_v"),
                    _str(s["material"], p + ".material"),
                )
            )
        except SchemaError:
            raise
        except ValueError as exc:
            raise ValidationError(f"{p}: {exc}") from exc

    arrays_doc = doc.get("arrays", [])
    if not isinstance(arrays_doc, list):
        raise SchemaError("$.arrays", "expected an array")
    arrays = []
    for i, a in enumerate(arrays_doc):
        p = f"$.arrays[{i}]"
        a = _fields(a, p, _ARRAY_FIELDS - {"tiles"}, {"tiles"})
        orient = None
        if "tiles" in a:
            if not isinstance(a["tiles"], list):
                raise SchemaError(p + ".tiles", "expected an array")
            orient = []
            for k, t in enumerate(a["tiles"]):
                tp = f"{p}.tiles[{k}]"
                t = _fields(t, tp, _TILE_FIELDS)
                orient.append((_num(t["theta_rad"], tp + ".theta_rad"), _num(t["phi_rad"], tp + ".phi_rad")))
        try:
            arrays.append(
                make_array(
                    _vec3(a["origin"], p + ".origin"),
                    _vec3(a["normal"], p + ".normal"),
                    rows=_int(a["rows"], p + ".rows"),
                    cols=_int(a["cols"], p + ".cols"),
                    tile_size=_num(a["tile_m"], p + ".tile_m"),
                    pitch=_num(a["pitch_m"], p + ".pitch_m"),
                    material_id=_str(a["material"], p + ".material"),
                    orientations=orient,
                )
            )
        except SchemaError:
            raise
        except ValueError as exc:
            raise ValidationError(f"{p}: {exc}") from exc

    ue_doc = doc["ue"]
    if not isinstance(ue_doc, list):
        raise SchemaError("$.ue", "expected an array")
    ues = tuple(_vec3(u, f"$.ue[{k}]") for k, u in enumerate(ue_doc))
    md = _fields(doc["measurement"], "$.measurement", _MEAS_FIELDS)
    meas = MeasurementPlane(
        height=_num(md["height_m"], "$.measurement.height_m"),
        cell_size=_num(md["cell_m"], "$.measurement.cell_m"),
        x_min=_num(md["x_min"], "$.measurement.x_min"),
        x_max=_num(md["x_max"], "$.measurement.x_max"),
        y_min=_num(md["y_min"], "$.measurement.y_min"),
        y_max=_num(md["y_max"], "$.measurement.y_max"),
    )
    scene = Scene(
        frequency_ghz=_num(doc["frequency_ghz"], "$.frequency_ghz"),
        surfaces=tuple(surfaces),
        arrays=tuple(arrays),
        ap=_vec3(doc["ap"], "$.ap"),
        ue_positions=ues,
        measurement=meas,
        tx_power_dbm=_num(doc.get("tx_power_dbm", DEFAULT_TX_POWER_DBM), "$.tx_power_dbm"),
        materials=materials,
    )
    return scene.validate()


def parse_scene(text: str) -> Scene:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from exc
    return scene_from_dict(doc)


def _lst(v: Iterable[float]) -> list[float]:
    return [float(x) for x in v]


def scene_to_dict(s: Scene) -> dict:
    return {
        "frequency_ghz": float(s.frequency_ghz),
        "tx_power_dbm": float(s.tx_power_dbm),
        "materials": {
            name: {
                "a": m.a,
                "b": m.b,
                "c": m.c,
                "d": m.d,
                "f_min_ghz": m.f_min_ghz,
                "f_max_ghz": m.f_max_ghz,
            }
            for name, m in s.materials.items()
        },
        "surfaces": [
            {"corner": _lst(r.corner), "edge_u": _lst(r.edge_u), "edge_v": _lst(r.edge_v), "material": r.material_id}
            for r in s.surfaces
        ],
        "arrays": [
            {
                "origin": _lst(a.origin),
                "normal": _lst(a.mounting_normal),
                "rows": a.rows,
                "cols": a.cols,
                "tile_m": a.tile_size,
                "pitch_m": a.pitch,
                "material": a.material_id,
                "tiles": [{"theta_rad": t.theta, "phi_rad": t.phi} for t in a.tiles],
            }
            for a in s.arrays
        ],
        "ap": _lst(s.ap),
        "ue": [_lst(u) for u in s.ue_positions],
        "measurement": {
            "height_m": s.measurement.height,
            "cell_m": s.measurement.cell_size,
            "x_min": s.measurement.x_min,
            "x_max": s.measurement.x_max,
            "y_min": s.measurement.y_min,
            "y_max": s.measurement.y_max,
        },
    }


def serialize_scene(s: Scene) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(scene_to_dict(s), sort_keys=True, indent=2) + "\n"


def _close(a: Any, b: Any, atol: float) -> bool:
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(_close(a[k], b[k], atol) for k in a)
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(_close(x, y, atol) for x, y in zip(a, b))
    if isinstance(a, (int, float)) and isinstance(b, (int, float)) and not isinstance(a, bool):
        return abs(a - b) <= atol
    return a == b


def scenes_equal(a: Scene, b: Scene, atol: float = 1e-12) -> bool:
    """Structural equality with numeric fields compared to ``atol``."""
    return _close(scene_to_dict(a), scene_to_dict(b), atol)


# ---------------------------------------------------------------- builders


def _box_walls(x0: float, x1: float, y0: float, y1: float, h: float, material: str) -> list[Rect3]:
    """Floor and ceiling rectangles over ``[x0, x1] x [y0, y1]``."""
    return [
        Rect3((x0, y0, 0.0), (x1 - x0, 0.0, 0.0), (0.0, y1 - y0, 0.0), material),
        Rect3((x0, y0, h), (x1 - x0, 0.0, 0.0), (0.0, y1 - y0, 0.0), material),
    ]


def _wall_x(x: float, y0: float, y1: float, h: float, material: str) -> Rect3:
    """Vertical wall in the plane ``x = const``."""
    return Rect3((x, y0, 0.0), (0.0, y1 - y0, 0.0), (0.0, 0.0, h), material)


def _wall_y(y: float, x0: float, x1: float, h: float, material: str) -> Rect3:
    return Rect3((x0, y, 0.0), (x1 - x0, 0.0, 0.0), (0.0, 0.0, h), material)


def _check_positive(**params: float) -> None:
    for k, v in params.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not (v > 0 and math.isfinite(v)):
            raise ParamError(f"{k} must be a positive number, got {v!r}")


def _measurement(surfaces: Sequence[Rect3], cell: float) -> MeasurementPlane:
    pts = np.concatenate([r.corners() for r in surfaces])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    return MeasurementPlane(MEASUREMENT_HEIGHT, cell, float(lo[0]), float(hi[0]), float(lo[1]), float(hi[1]))


def _ue_offsets(first: float, last: float, n: int = 9) -> list[float]:
    return [first + k * (last - first) / (n - 1) for k in range(n)]


def build_hallway_L(
    leg_length: float = 20.0,
    width: float = 3.0,
    height: float = 3.0,
    *,
    with_array: bool = True,
    frequency_ghz: float = DEFAULT_FREQUENCY_GHZ,
    tx_power_dbm: float = DEFAULT_TX_POWER_DBM,
    cell_size: float = DEFAULT_CELL,
) -> Scene:
    """L-shaped concrete hallway.

    The LOS leg runs along +x over ``[0, L] x [0, W]`` with the AP 1 m from
    its closed end. The NLOS leg runs along +y over ``[L-W, L] x [W, L]``.
    The reflector slot is on the south wall of the junction, facing up the
    NLOS leg. UEs 1..9 sit on the NLOS centreline, numbered from the corner.
    """
    _check_positive(leg_length=leg_length, width=width, height=height)
    L, W, H = float(leg_length), float(width), float(height)
    if L < W + 4.0:
        raise ParamError("leg_length must exceed width by at least 4 m")
    if H <= MEASUREMENT_HEIGHT + 0.5:
        raise ParamError("height must leave room above the 1.5 m measurement plane")
    mat = "concrete"
    surfaces = [
        _wall_y(0.0, 0.0, L, H, mat),  # south, full length
        _wall_x(0.0, 0.0, W, H, mat),  # LOS-leg end, behind the AP
        _wall_y(W, 0.0, L - W, H, mat),  # north of LOS leg up to the opening
        _wall_x(L - W, W, L, H, mat),  # inner wall of NLOS leg
        _wall_x(L, 0.0, L, H, mat),  # outer east wall
        _wall_y(L, L - W, L, H, mat),  # NLOS-leg end
        *_box_walls(0.0, L, 0.0, W, H, mat),
        *_box_walls(L - W, L, W, L, H, mat),
    ]
    ap = (1.0, W / 2.0, MEASUREMENT_HEIGHT)
    xs = L - W / 2.0
    ues = tuple((xs, y, MEASUREMENT_HEIGHT) for y in _ue_offsets(W + 2.0, L - 1.0))
    arrays: tuple[ReflectorArray, ...] = ()
    if with_array:
        arrays = (make_array((L - W / 2.0, MOUNT_OFFSET, MEASUREMENT_HEIGHT), (0.0, 1.0, 0.0)),)
    return Scene(
        frequency_ghz=frequency_ghz,
        surfaces=tuple(surfaces),
        arrays=arrays,
        ap=ap,
        ue_positions=ues,
        measurement=_measurement(surfaces, cell_size),
        tx_power_dbm=tx_power_dbm,
    ).validate()


def build_hallway_T(
    stem_length: float = 20.0,
    bar_length: float = 30.0,
    width: float = 3.0,
    height: float = 3.0,
    *,
    with_array: bool = True,
    frequency_ghz: float = DEFAULT_FREQUENCY_GHZ,
    tx_power_dbm: float = DEFAULT_TX_POWER_DBM,
    cell_size: float = DEFAULT_CELL,
) -> Scene:
    """T-shaped concrete hallway.

    The stem (LOS leg, AP 1 m from its closed end) runs along +x over
    ``[0, S] x [0, W]`` into the middle of a bar ``[S, S+W]`` spanning
    ``bar_length`` along y. UEs 1..9 sit in the -y arm of the bar. Array 1
    is on the junction's far wall facing the stem; array 2 is on the -y arm's
    end wall, facing back up the arm towards the junction.
    """
    _check_positive(stem_length=stem_length, bar_length=bar_length, width=width, height=height)
    S, B, W, H = float(stem_length), float(bar_length), float(width), float(height)
    if B < W + 8.0 or S < 4.0:
        raise ParamError("bar_length must exceed width by 8 m and stem_length must be >= 4 m")
    if H <= MEASUREMENT_HEIGHT + 0.5:
        raise ParamError("height must leave room above the 1.5 m measurement plane")
    mat = "concrete"
    y0, y1 = W / 2.0 - B / 2.0, W / 2.0 + B / 2.0
    surfaces = [
        _wall_y(0.0, 0.0, S, H, mat),  # stem south
        _wall_y(W, 0.0, S, H, mat),  # stem north
        _wall_x(0.0, 0.0, W, H, mat),  # stem end, behind the AP
        _wall_x(S, y0, 0.0, H, mat),  # bar west, -y arm
        _wall_x(S, W, y1, H, mat),  # bar west, +y arm
        _wall_x(S + W, y0, y1, H, mat),  # bar east, full
        _wall_y(y0, S, S + W, H, mat),  # -y arm end
        _wall_y(y1, S, S + W, H, mat),  # +y arm end
        *_box_walls(0.0, S, 0.0, W, H, mat),
        *_box_walls(S, S + W, y0, y1, H, mat),
    ]
    ap = (1.0, W / 2.0, MEASUREMENT_HEIGHT)
    xs = S + W / 2.0
    ues = tuple((xs, y, MEASUREMENT_HEIGHT) for y in _ue_offsets(-2.0, y0 + 1.0))
    arrays: tuple[ReflectorArray, ...] = ()
    if with_array:
        arrays = (
            make_array((S + W - MOUNT_OFFSET, W / 2.0, MEASUREMENT_HEIGHT), (-1.0, 0.0, 0.0)),
            make_array((xs, y0 + MOUNT_OFFSET, MEASUREMENT_HEIGHT), (0.0, 1.0, 0.0)),
        )
    return Scene(
        frequency_ghz=frequency_ghz,
        surfaces=tuple(surfaces),
        arrays=arrays,
        ap=ap,
        ue_positions=ues,
        measurement=_measurement(surfaces, cell_size),
        tx_power_dbm=tx_power_dbm,
    ).validate()
