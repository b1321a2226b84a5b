import math

import pytest
from hypothesis import settings

from lfrsim.scene import MeasurementPlane, Scene, build_hallway_L, build_hallway_T

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


def free_space_scene(ap=(0.0, 0.0, 7.5), extent=(7.875, 8.125, -0.125, 0.125), cell=0.25, ues=None):
    """No surfaces at all; by default one cell centred exactly 10 m from the AP."""
    x0, x1, y0, y1 = extent
    ue = ues if ues is not None else ((8.0, 0.0, 1.5),)
    return Scene(
        frequency_ghz=28.0,
        surfaces=(),
        arrays=(),
        ap=ap,
        ue_positions=ue,
        measurement=MeasurementPlane(1.5, cell, x0, x1, y0, y1),
    ).validate()


@pytest.fixture(scope="session")
def hall_L():
    return build_hallway_L()


@pytest.fixture(scope="session")
def hall_T():
    return build_hallway_T()


def friis_db(d, f_ghz=28.0):
    lam = 299_792_458.0 / (f_ghz * 1e9)
    return 20.0 * math.log10(lam / (4.0 * math.pi * d))


# ------------------------------------------------------- acceptance reporting

ACCEPTANCE: dict[int, str] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(ACCEPTANCE[criterion])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
