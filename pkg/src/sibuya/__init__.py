"""Canonical solutions, Stokes multipliers and their zeros for
``-Phi'' + (X^m + a1 X^(m-1) + ... + am) Phi = 0``."""

from .errors import (
    ContourError,
    DegenerateInputError,
    IntegrationError,
    NearZeroError,
    SibuyaError,
    VerificationError,
)
from .integrator import RayConfig, canonical_origin, f0
from .potential import Potential, asymptotic_frame, exponent_rm, omega, rotate
from .stokes import stokes_c, stokes_c_from_f0, stokes_ck
from .zeros import SearchWindow, ZeroRecord, scan_real_zeros, sweep_family, winding_count

__all__ = [
    "ContourError", "DegenerateInputError", "IntegrationError", "NearZeroError", "SibuyaError",
    "VerificationError", "RayConfig", "canonical_origin", "f0", "Potential", "asymptotic_frame",
    "exponent_rm", "omega", "rotate", "stokes_c", "stokes_c_from_f0", "stokes_ck", "SearchWindow",
    "ZeroRecord", "scan_real_zeros", "sweep_family", "winding_count",
]
