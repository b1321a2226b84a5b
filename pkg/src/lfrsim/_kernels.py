"""Compiled inner loops of the ray tracer.

Scenes arrive packed into a ``geo`` row-per-rectangle array plus a ``groups``
table (see ``tracer.pack_scene``). Walls are
always tested; each reflector array is a group guarded by a bounding box.
"""

from __future__ import annotations

import cmath
import math

import numba as nb
import numpy as np

HIT_EPS = 1e-6
CROSS_EPS = 1e-9
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
TWO_PI = 2.0 * math.pi

POL_TE = 0
POL_TM = 1
POL_UNPOLARIZED = 2

_jit = nb.njit(cache=True, nogil=True, error_model="numpy")
_inline = nb.njit(cache=True, nogil=True, error_model="numpy", inline="always")
_pjit = nb.njit(cache=True, nogil=True, error_model="numpy", parallel=True)


@_jit
def fib_direction(i, n):
    """Direction ``i`` of an ``n``-point Fibonacci sphere lattice."""
    z = 1.0 - (2.0 * i + 1.0) / n
    r = math.sqrt(max(0.0, 1.0 - z * z))
    phi = i * GOLDEN_ANGLE
    phi -= TWO_PI * math.floor(phi / TWO_PI)
    return r * math.cos(phi), r * math.sin(phi), z


@_jit
def fib_lattice(n):
    out = np.empty((n, 3))
    for i in range(n):
        x, y, z = fib_direction(i, n)
        out[i, 0] = x
        out[i, 1] = y
        out[i, 2] = z
    return out


@_jit
def gamma(eta, cos_i, pol):
    """Fresnel amplitude coefficient of a smooth half-space."""
    if cos_i > 1.0:
        cos_i = 1.0
    sin2 = 1.0 - cos_i * cos_i
    root = cmath.sqrt(eta - sin2)
    te = (cos_i - root) / (cos_i + root)
    if pol == POL_TE:
        return te
    tm = (eta * cos_i - root) / (eta * cos_i + root)
    if pol == POL_TM:
        return tm
    mag = math.sqrt(0.5 * (abs(te) ** 2 + abs(tm) ** 2))
    a = abs(te)
    if a == 0.0:
        return complex(mag, 0.0)
    return te * (mag / a)


@_inline
def _rect_t(geo, k, px, py, pz, dx, dy, dz):
    # geo row: corner[0:3], edge_u[3:6], edge_v[6:9], unit normal[9:12], |u|^2, |v|^2
    denom = dx * geo[k, 9] + dy * geo[k, 10] + dz * geo[k, 11]
    if denom == 0.0:
        return math.inf
    cx = geo[k, 0] - px
    cy = geo[k, 1] - py
    cz = geo[k, 2] - pz
    t = (cx * geo[k, 9] + cy * geo[k, 10] + cz * geo[k, 11]) / denom
    if not t > HIT_EPS:
        return math.inf
    qx = t * dx - cx
    qy = t * dy - cy
    qz = t * dz - cz
    s = (qx * geo[k, 3] + qy * geo[k, 4] + qz * geo[k, 5]) / geo[k, 12]
    if s < 0.0 or s > 1.0:
        return math.inf
    w = (qx * geo[k, 6] + qy * geo[k, 7] + qz * geo[k, 8]) / geo[k, 13]
    if w < 0.0 or w > 1.0:
        return math.inf
    return t


@_inline
def _slab(p, d, lo, hi, t0, t1):
    if d == 0.0:
        if p < lo or p > hi:
            return math.inf, -math.inf
        return t0, t1
    ta = (lo - p) / d
    tb = (hi - p) / d
    if ta > tb:
        ta, tb = tb, ta
    return max(t0, ta), min(t1, tb)


@_inline
def _box_t(groups, g, px, py, pz, dx, dy, dz):
    """Entry distance into group ``g``'s bounding box, inf on a miss.

    groups row: start, end, lo[2:5], hi[5:8].
    """
    t0, t1 = _slab(px, dx, groups[g, 2], groups[g, 5], -math.inf, math.inf)
    t0, t1 = _slab(py, dy, groups[g, 3], groups[g, 6], t0, t1)
    t0, t1 = _slab(pz, dz, groups[g, 4], groups[g, 7], t0, t1)
    if t1 < t0 or t1 < HIT_EPS:
        return math.inf
    return t0


@_inline
def nearest_hit(geo, n_walls, groups, px, py, pz, dx, dy, dz):
    best = math.inf
    idx = -1
    for k in range(n_walls):
        t = _rect_t(geo, k, px, py, pz, dx, dy, dz)
        if t < best:
            best = t
            idx = k
    for g in range(groups.shape[0]):
        if _box_t(groups, g, px, py, pz, dx, dy, dz) >= best:
            continue
        for k in range(int(groups[g, 0]), int(groups[g, 1])):
            t = _rect_t(geo, k, px, py, pz, dx, dy, dz)
            if t < best:
                best = t
                idx = k
    return best, idx


@_jit
def trace_one(ox, oy, oz, dx, dy, dz, max_bounces, min_amp, pol, geo, eta, n_walls, groups):
    """Trace a single ray.

    Returns ``(points, ids, cosines, n_bounces, end_point, status)`` where
    status is 0 = reached max bounces, 1 = escaped, 2 = absorbed.
    """
    pts = np.empty((max_bounces, 3))
    ids = np.full(max_bounces, -1, dtype=np.int64)
    cos_arr = np.empty(max_bounces)
    end = np.full(3, np.nan)
    px, py, pz = ox, oy, oz
    amp2 = 1.0
    nb_ = 0
    while True:
        t, k = nearest_hit(geo, n_walls, groups, px, py, pz, dx, dy, dz)
        if k < 0:
            return pts, ids, cos_arr, nb_, end, 1
        hx = px + t * dx
        hy = py + t * dy
        hz = pz + t * dz
        if nb_ == max_bounces:
            end[0] = hx
            end[1] = hy
            end[2] = hz
            return pts, ids, cos_arr, nb_, end, 0
        dn = dx * geo[k, 9] + dy * geo[k, 10] + dz * geo[k, 11]
        c = abs(dn)
        pts[nb_, 0] = hx
        pts[nb_, 1] = hy
        pts[nb_, 2] = hz
        ids[nb_] = k
        cos_arr[nb_] = c
        nb_ += 1
        amp2 *= abs(gamma(eta[k], c, pol)) ** 2
        if math.sqrt(amp2) < min_amp:
            return pts, ids, cos_arr, nb_, end, 2
        dx -= 2.0 * dn * geo[k, 9]
        dy -= 2.0 * dn * geo[k, 10]
        dz -= 2.0 * dn * geo[k, 11]
        px, py, pz = hx, hy, hz


@_pjit
def coverage_kernel(
    n_rays, n_batches, ox, oy, oz, max_bounces, min_amp, pol, geo, eta, n_walls, groups,
    height, x_min, y_min, cell, weight, cos_floor, out,
):
    """Accumulate plane crossings of every lattice ray into ``out[batch]``.

    A crossing adds ``weight * prod|gamma|^2 / max(|cos|, cos_floor)``;
    ``weight`` already folds in ``lambda^2 / (4 pi N A_cell)``.
    """
    ny = out.shape[1]
    nx = out.shape[2]
    per = (n_rays + n_batches - 1) // n_batches
    for b in nb.prange(n_batches):
        grid = out[b]
        start = b * per
        stop = min(n_rays, start + per)
        for i in range(start, stop):
            dx, dy, dz = fib_direction(i, n_rays)
            px, py, pz = ox, oy, oz
            amp2 = 1.0
            bounces = 0
            while True:
                t, k = nearest_hit(geo, n_walls, groups, px, py, pz, dx, dy, dz)
                if dz != 0.0:
                    tc = (height - pz) / dz
                    if tc > CROSS_EPS and tc < t:
                        ix = math.floor((px + tc * dx - x_min) / cell)
                        iy = math.floor((py + tc * dy - y_min) / cell)
                        if 0 <= ix < nx and 0 <= iy < ny:
                            grid[iy, ix] += weight * amp2 / max(abs(dz), cos_floor)
                if k < 0 or bounces == max_bounces:
                    break
                dn = dx * geo[k, 9] + dy * geo[k, 10] + dz * geo[k, 11]
                amp2 *= abs(gamma(eta[k], abs(dn), pol)) ** 2
                bounces += 1
                if math.sqrt(amp2) < min_amp:
                    break
                px += t * dx
                py += t * dy
                pz += t * dz
                dx -= 2.0 * dn * geo[k, 9]
                dy -= 2.0 * dn * geo[k, 10]
                dz -= 2.0 * dn * geo[k, 11]


@_pjit
def capture_kernel(
    n_rays, ox, oy, oz, tx, ty, tz, radius, max_bounces, min_amp, pol, geo, eta, n_walls, groups,
    captured, seq,
):
    """Flag ray segments passing within ``radius`` of the target.

    ``captured[i, k]`` marks segment ``k`` (after ``k`` bounces) of ray ``i``;
    ``seq[i, :]`` holds the surface indices hit by ray ``i``.
    """
    for i in nb.prange(n_rays):
        dx, dy, dz = fib_direction(i, n_rays)
        px, py, pz = ox, oy, oz
        amp2 = 1.0
        bounces = 0
        while True:
            t, k = nearest_hit(geo, n_walls, groups, px, py, pz, dx, dy, dz)
            wx = tx - px
            wy = ty - py
            wz = tz - pz
            s = wx * dx + wy * dy + wz * dz
            if s < 0.0:
                s = 0.0
            if s > t:
                s = t
            ex = wx - s * dx
            ey = wy - s * dy
            ez = wz - s * dz
            if ex * ex + ey * ey + ez * ez <= radius * radius:
                captured[i, bounces] = 1
            if k < 0 or bounces == max_bounces:
                break
            dn = dx * geo[k, 9] + dy * geo[k, 10] + dz * geo[k, 11]
            amp2 *= abs(gamma(eta[k], abs(dn), pol)) ** 2
            seq[i, bounces] = k
            bounces += 1
            if math.sqrt(amp2) < min_amp:
                break
            px += t * dx
            py += t * dy
            pz += t * dz
            dx -= 2.0 * dn * geo[k, 9]
            dy -= 2.0 * dn * geo[k, 10]
            dz -= 2.0 * dn * geo[k, 11]
