"""Geometric kernel: vectors, bisector normals, spherical angles, reflection,
tile rotation and ray/rectangle intersection.

Vectors are plain ``numpy`` arrays of shape ``(3,)``. Every function here is
pure, so it is safe to call from any thread.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

Vector = NDArray[np.float64]

HIT_EPS = 1e-6  # minimum hit distance after a bounce [m]
_AXIS_EPS2 = 1e-18  # x^2 + y^2 below this is treated as on the z-axis


class GeometryError(ValueError):
    pass


class DegenerateBisector(GeometryError):
    """The two directions seen from the tile are exactly opposite."""


class CoincidentPoint(GeometryError):
    pass


class ZeroVector(GeometryError):
    pass


def vec(x: ArrayLike) -> Vector:
    v = np.asarray(x, dtype=np.float64).reshape(3)
    if not np.all(np.isfinite(v)):
        raise GeometryError(f"non-finite vector component: {v}")
    return v


def normalize(v: ArrayLike) -> Vector:
    v = np.asarray(v, dtype=np.float64)
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ZeroVector("cannot normalize the zero vector")
    return v / n


class SphericalAngles(NamedTuple):
    r: float
    theta: float  # elevation from +z, [0, pi]
    phi: float  # azimuth, (-pi, pi]


@dataclass(frozen=True)
class Ray:
    origin: Vector
    direction: Vector

    def __post_init__(self):
        object.__setattr__(self, "origin", vec(self.origin))
        d = vec(self.direction)
        if abs(np.linalg.norm(d) - 1.0) > 1e-9:
            raise GeometryError("ray direction must be unit length")
        object.__setattr__(self, "direction", d)


@dataclass(frozen=True)
class Rect3:
    """Planar rectangle ``corner + s*edge_u + t*edge_v`` for ``s, t`` in [0, 1]."""

    corner: Vector
    edge_u: Vector
    edge_v: Vector
    material_id: str = "concrete"

    def __post_init__(self):
        for name in ("corner", "edge_u", "edge_v"):
            object.__setattr__(self, name, vec(getattr(self, name)))
        lu = np.linalg.norm(self.edge_u)
        lv = np.linalg.norm(self.edge_v)
        if lu == 0.0 or lv == 0.0:
            raise GeometryError("rectangle edges must be nonzero")
        if abs(float(np.dot(self.edge_u, self.edge_v))) > 1e-9 * max(1.0, lu * lv):
            raise GeometryError("rectangle edges must be orthogonal")

    @property
    def normal(self) -> Vector:
        return normalize(np.cross(self.edge_u, self.edge_v))

    @property
    def center(self) -> Vector:
        return self.corner + 0.5 * (self.edge_u + self.edge_v)

    def corners(self) -> NDArray[np.float64]:
        c, u, v = self.corner, self.edge_u, self.edge_v
        return np.array([c, c + u, c + u + v, c + v])


class Hit(NamedTuple):
    t: float
    point: Vector
    cos_incidence: float


def bisector_normal(a: ArrayLike, b: ArrayLike, c: ArrayLike) -> Vector:
    """Unit normal at ``a`` that mirrors a ray arriving from ``b`` onto ``c``.

    The half-sum of the unit vectors towards ``b`` and ``c`` is normalized;
    only its direction is used downstream.
    """
    a, b, c = vec(a), vec(b), vec(c)
    ab = b - a
    ac = c - a
    nab = np.linalg.norm(ab)
    nac = np.linalg.norm(ac)
    if nab == 0.0 or nac == 0.0:
        raise CoincidentPoint("source or target coincides with the reflection point")
    half = 0.5 * (ab / nab + ac / nac)
    nh = np.linalg.norm(half)
    if nh <= 1e-15:
        raise DegenerateBisector("source and target lie in opposite directions")
    return half / nh


def cartesian_to_spherical(v: ArrayLike) -> SphericalAngles:
    x, y, z = vec(v)
    r = math.sqrt(x * x + y * y + z * z)
    if r == 0.0:
        raise ZeroVector("spherical angles of the zero vector are undefined")
    rho2 = x * x + y * y
    # atan2(rho, z) equals arccos(z / r) but stays accurate near the poles
    theta = math.atan2(math.sqrt(rho2), z)
    if rho2 < _AXIS_EPS2:
        phi = 0.0
    elif y == 0.0:
        # sgn(0) = 0 would put the negative x-axis at phi = 0
        phi = math.pi if x < 0.0 else 0.0
    else:
        # sgn(y) * arccos(x / rho), evaluated stably
        phi = math.atan2(y, x)
    return SphericalAngles(r, theta, phi)


def spherical_to_cartesian(s: SphericalAngles) -> Vector:
    r, theta, phi = s
    st = math.sin(theta)
    return np.array([r * st * math.cos(phi), r * st * math.sin(phi), r * math.cos(theta)])


def wrap_angle(phi: float) -> float:
    """Map an angle into (-pi, pi]."""
    w = math.remainder(phi, 2.0 * math.pi)
    if w <= -math.pi:
        w += 2.0 * math.pi
    return w


def reflect_direction(d: ArrayLike, n: ArrayLike) -> Vector:
    d = np.asarray(d, dtype=np.float64)
    n = np.asarray(n, dtype=np.float64)
    return d - 2.0 * float(np.dot(d, n)) * n


def rot_z(angle: float) -> NDArray[np.float64]:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_y(angle: float) -> NDArray[np.float64]:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def tile_rotation(theta: float, phi: float) -> NDArray[np.float64]:
    """Rotation taking a flat, upward-facing tile to normal ``(theta, phi)``.

    Roll about the normal is fixed by the ``Rz(phi) @ Ry(theta)`` convention.
    """
    return rot_z(phi) @ rot_y(theta)


def ray_rect_intersect(ray: Ray, rect: Rect3, eps: float = HIT_EPS) -> Optional[Hit]:
    """Intersection of ``ray`` with ``rect``; boundary points count as hits."""
    n = np.cross(rect.edge_u, rect.edge_v)
    denom = float(np.dot(ray.direction, n))
    if denom == 0.0:
        return None
    t = float(np.dot(rect.corner - ray.origin, n)) / denom
    if not t > eps:
        return None
    p = ray.origin + t * ray.direction
    rel = p - rect.corner
    s = float(np.dot(rel, rect.edge_u)) / float(np.dot(rect.edge_u, rect.edge_u))
    w = float(np.dot(rel, rect.edge_v)) / float(np.dot(rect.edge_v, rect.edge_v))
    if s < 0.0 or s > 1.0 or w < 0.0 or w > 1.0:
        return None
    cos_i = abs(denom) / float(np.linalg.norm(n))
    return Hit(t, p, cos_i)


def segment_blocked(p: ArrayLike, q: ArrayLike, rects, skip=(), eps: float = HIT_EPS) -> bool:
    """True if any rectangle (other than indices in ``skip``) cuts segment ``p -> q``."""
    p, q = vec(p), vec(q)
    seg = q - p
    length = float(np.linalg.norm(seg))
    if length == 0.0:
        return False
    ray = Ray(p, seg / length)
    for i, rect in enumerate(rects):
        if i in skip:
            continue
        hit = ray_rect_intersect(ray, rect, eps)
        if hit is not None and hit.t < length - eps:
            return True
    return False
