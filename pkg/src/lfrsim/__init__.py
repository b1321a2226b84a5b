"""Specular ray tracing of indoor mmWave hallways with metallic linear
Fresnel reflector arrays."""

import warnings

# numba probes an old TBB at first parallel launch; the fallback layer is fine
warnings.filterwarnings("ignore", message="The TBB threading layer")

__version__ = "0.1.0"
