import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lfrsim import _kernels as K
from lfrsim.geometry import segment_blocked
from lfrsim.scene import (
    MOUNT_OFFSET,
    ParamError,
    SchemaError,
    ValidationError,
    build_hallway_L,
    build_hallway_T,
    make_array,
    parse_scene,
    scene_to_dict,
    scenes_equal,
    serialize_scene,
)
from lfrsim.tracer import pack_scene


@st.composite
def scenes(draw):
    """Random hallways with random tile orientations and radio parameters."""
    width = draw(st.floats(2.0, 5.0))
    height = draw(st.floats(2.5, 4.0))
    common = dict(
        frequency_ghz=draw(st.floats(1.0, 100.0)),
        tx_power_dbm=draw(st.floats(-10.0, 50.0)),
        cell_size=draw(st.floats(0.1, 1.0)),
    )
    if draw(st.booleans()):
        s = build_hallway_L(draw(st.floats(width + 4.5, 40.0)), width, height, **common)
    else:
        s = build_hallway_T(draw(st.floats(4.0, 30.0)), draw(st.floats(width + 8.5, 40.0)), width, height, **common)
    arrays = []
    for arr in s.arrays:
        n = len(arr.tiles)
        th = draw(st.lists(st.floats(0.0, math.pi), min_size=n, max_size=n))
        ph = draw(st.lists(st.floats(-math.pi, math.pi, exclude_min=True), min_size=n, max_size=n))
        arrays.append(arr.with_orientations(zip(th, ph)))
    return s.with_arrays(arrays)


@settings(max_examples=25)
@given(scenes())
def test_round_trip(scene):
    text = serialize_scene(scene)
    back = parse_scene(text)
    assert scenes_equal(scene, back, atol=1e-12)
    assert serialize_scene(back) == text  # canonical form is a fixed point


def test_serialization_is_canonical(hall_L):
    text = serialize_scene(hall_L)
    assert text.endswith("\n")
    assert json.loads(text) == json.loads(json.dumps(scene_to_dict(hall_L), sort_keys=True))


def _doc(scene):
    return json.loads(serialize_scene(scene))


def test_unknown_field_rejected(hall_L):
    d = _doc(hall_L)
    d["surfaces"][2]["colour"] = "grey"
    with pytest.raises(SchemaError) as e:
        parse_scene(json.dumps(d))
    assert "$.surfaces[2]" in str(e.value)


def test_missing_field_rejected(hall_L):
    d = _doc(hall_L)
    del d["measurement"]["cell_m"]
    with pytest.raises(SchemaError):
        parse_scene(json.dumps(d))


def test_bad_json_rejected():
    with pytest.raises(SchemaError):
        parse_scene("{not json")


def test_unknown_material_rejected(hall_L):
    d = _doc(hall_L)
    d["surfaces"][0]["material"] = "unobtainium"
    with pytest.raises(ValidationError):
        parse_scene(json.dumps(d))


def test_frequency_outside_material_range(hall_L):
    d = _doc(hall_L)
    d["frequency_ghz"] = 150.0
    with pytest.raises(ValidationError):
        parse_scene(json.dumps(d))


def test_ue_outside_enclosure_rejected(hall_L):
    d = _doc(hall_L)
    d["ue"][0] = [100.0, 1.0, 1.5]
    with pytest.raises(ValidationError):
        parse_scene(json.dumps(d))


def test_tile_count_mismatch_rejected(hall_L):
    d = _doc(hall_L)
    d["arrays"][0]["tiles"].pop()
    with pytest.raises(ValidationError):
        parse_scene(json.dumps(d))


@pytest.mark.parametrize("kw", [{"width": 0}, {"height": -1}, {"leg_length": float("nan")}, {"leg_length": 5.0}])
def test_builder_param_errors(kw):
    with pytest.raises(ParamError):
        build_hallway_L(**kw)


def test_t_builder_param_error():
    with pytest.raises(ParamError):
        build_hallway_T(width=0)


# ----------------------------------------------------------------- builders


@pytest.mark.parametrize("which", ["L", "T"])
def test_builder_layout(which, hall_L, hall_T):
    s = hall_L if which == "L" else hall_T
    assert len(s.ue_positions) == 9
    assert all(u[2] == 1.5 for u in s.ue_positions)
    assert s.ap[2] == 1.5
    assert len(s.arrays) == (1 if which == "L" else 2)
    for arr in s.arrays:
        assert (arr.rows, arr.cols, len(arr.tiles)) == (10, 7, 70)
        assert arr.tile_size == 0.2


@pytest.mark.parametrize("which", ["L", "T"])
def test_all_ues_are_nlos(which, hall_L, hall_T):
    s = hall_L if which == "L" else hall_T
    for ue in s.ue_positions:
        assert segment_blocked(s.ap, ue, s.surfaces)


@pytest.mark.parametrize("which", ["L", "T"])
def test_ues_numbered_from_the_corner(which, hall_L, hall_T):
    s = hall_L if which == "L" else hall_T
    d = [np.linalg.norm(np.subtract(u, s.ap)) for u in s.ue_positions]
    assert d == sorted(d)


@pytest.mark.parametrize("which", ["L", "T"])
def test_enclosure_is_watertight(which, hall_L, hall_T):
    """No ray launched from the AP may leave the closed hallway."""
    s = hall_L if which == "L" else hall_T
    pk = pack_scene(s)
    ox, oy, oz = s.ap
    n = 100_000
    escaped = 0
    for i in range(n):
        dx, dy, dz = K.fib_direction(i, n)
        _, _, _, _, _, status = K.trace_one(ox, oy, oz, dx, dy, dz, 5, 0.0, K.POL_TE, *pk.kernel_args())
        escaped += status == 1
    assert escaped == 0


def test_array_clears_its_wall(hall_L):
    # a flush tile must not pierce the wall it is mounted on
    arr = hall_L.arrays[0]
    assert MOUNT_OFFSET > math.hypot(arr.tile_size / 2, arr.tile_size / 2)
    for t in arr.tiles:
        assert t.corners()[:, 1].min() > 0.0


def test_make_array_indexing():
    arr = make_array((0.0, 0.0, 1.5), (0.0, 1.0, 0.0), rows=3, cols=2, pitch=0.5)
    c = arr.tile_centers
    # tile k at row k // cols, col k % cols; rows vertical, cols horizontal
    assert c[1][2] == c[0][2] and c[2][2] > c[0][2]
    np.testing.assert_allclose(c.mean(axis=0), [0.0, 0.0, 1.5], atol=1e-15)
    np.testing.assert_allclose([t.normal for t in arr.tiles], [[0.0, 1.0, 0.0]] * 6, atol=1e-15)


def test_measurement_grid_shape(hall_L):
    m = hall_L.measurement
    ny, nx = m.shape
    assert nx == round((m.x_max - m.x_min) / m.cell_size)
    assert ny == round((m.y_max - m.y_min) / m.cell_size)
    assert m.cell_of((m.x_min + 1e-9, m.y_min + 1e-9, 1.5)) == (0, 0)
    assert m.cell_of((m.x_max + 1.0, m.y_min, 1.5)) is None


def test_t_mounting_slots_see_each_other(hall_T):
    a1, a2 = hall_T.arrays
    for p, q in zip(a1.tile_centers, a2.tile_centers):
        assert not segment_blocked(p, q, hall_T.surfaces)


@given(st.floats(0.0, math.pi), st.floats(-math.pi, math.pi, exclude_min=True), st.floats(0.01, 1.0))
def test_tile_corners_are_coplanar(theta, phi, half):
    arr = make_array((1.0, 2.0, 1.5), (0.0, 1.0, 0.0), rows=1, cols=1, tile_size=2 * half)
    tile = arr.with_orientations([(theta, phi)]).tiles[0]
    c = tile.corners()
    n = tile.normal
    assert np.abs((c - np.asarray(tile.center)) @ n).max() <= 1e-9
    np.testing.assert_allclose(c.mean(axis=0), tile.center, atol=1e-12)
