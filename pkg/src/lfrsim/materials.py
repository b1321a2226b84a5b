"""ITU-style frequency-dependent materials and Fresnel reflection coefficients.

Real permittivity and conductivity follow power laws in frequency (GHz):
``eta' = a * f**b`` and ``sigma = c * f**d``. The complex relative permittivity
is ``eta' - j * 17.98 * sigma / f``, and each bounce is a smooth half-space
reflection.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple


class FrequencyOutOfRange(ValueError):
    pass


class Polarization(str, Enum):
    TE = "te"
    TM = "tm"
    UNPOLARIZED = "unpolarized"


@dataclass(frozen=True)
class MaterialSpec:
    name: str
    a: float
    b: float
    c: float
    d: float
    f_min_ghz: float = 1.0
    f_max_ghz: float = 100.0

    def __post_init__(self):
        if not self.a > 0.0:
            raise ValueError(f"material {self.name!r}: coefficient a must be > 0")
        if self.c < 0.0:
            raise ValueError(f"material {self.name!r}: coefficient c must be >= 0")
        if not self.f_min_ghz <= self.f_max_ghz:
            raise ValueError(f"material {self.name!r}: empty frequency range")

    def check_frequency(self, f_ghz: float) -> None:
        if not self.f_min_ghz <= f_ghz <= self.f_max_ghz:
            raise FrequencyOutOfRange(
                f"{f_ghz} GHz outside [{self.f_min_ghz}, {self.f_max_ghz}] GHz for {self.name!r}"
            )


METAL = MaterialSpec("metal", a=1.0, b=0.0, c=1e7, d=0.0, f_min_ghz=1.0, f_max_ghz=100.0)
CONCRETE = MaterialSpec("concrete", a=5.24, b=0.0, c=0.0462, d=0.7822, f_min_ghz=1.0, f_max_ghz=100.0)

BUILTIN_MATERIALS = {m.name: m for m in (METAL, CONCRETE)}


class ComplexPermittivity(NamedTuple):
    real_part: float
    imag_part: float  # magnitude of the loss term; eta = real_part - 1j * imag_part

    @property
    def value(self) -> complex:
        return complex(self.real_part, -self.imag_part)


class FresnelCoefficients(NamedTuple):
    gamma_te: complex
    gamma_tm: complex


def eval_eta_prime(m: MaterialSpec, f_ghz: float) -> float:
    m.check_frequency(f_ghz)
    return m.a * f_ghz**m.b


def eval_sigma(m: MaterialSpec, f_ghz: float) -> float:
    """Conductivity in S/m."""
    m.check_frequency(f_ghz)
    return m.c * f_ghz**m.d


def complex_permittivity(m: MaterialSpec, f_ghz: float) -> ComplexPermittivity:
    return ComplexPermittivity(eval_eta_prime(m, f_ghz), 17.98 * eval_sigma(m, f_ghz) / f_ghz)


def fresnel_coefficients(eta: ComplexPermittivity | complex, cos_theta_i: float) -> FresnelCoefficients:
    """TE and TM amplitude reflection coefficients of a smooth half-space.

    ``cos_theta_i`` is measured against the surface normal; ``0`` is grazing.
    """
    if not 0.0 <= cos_theta_i <= 1.0:
        raise ValueError(f"cos_theta_i must lie in [0, 1], got {cos_theta_i}")
    e = eta.value if isinstance(eta, ComplexPermittivity) else complex(eta)
    sin2 = 1.0 - cos_theta_i * cos_theta_i
    root = cmath.sqrt(e - sin2)  # principal branch, Re >= 0
    gamma_te = (cos_theta_i - root) / (cos_theta_i + root)
    gamma_tm = (e * cos_theta_i - root) / (e * cos_theta_i + root)
    return FresnelCoefficients(gamma_te, gamma_tm)


def bounce_coefficient(
    eta: ComplexPermittivity | complex,
    cos_theta_i: float,
    polarization: Polarization | str = Polarization.TE,
) -> complex:
    """Complex amplitude factor applied to a path at one reflection."""
    pol = Polarization(polarization)
    g = fresnel_coefficients(eta, cos_theta_i)
    if pol is Polarization.TE:
        return g.gamma_te
    if pol is Polarization.TM:
        return g.gamma_tm
    mag = math.sqrt(0.5 * (abs(g.gamma_te) ** 2 + abs(g.gamma_tm) ** 2))
    return cmath.rect(mag, cmath.phase(g.gamma_te))
