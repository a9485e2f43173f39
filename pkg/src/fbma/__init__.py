"""Free boundary minimal annuli in geodesic balls of S^3, computed from the
do Carmo-Dajczer family of rotational minimal surfaces."""

from __future__ import annotations

from fbma.annuli import AnnulusBand, find_f_zeros, first_positive_zero, radius, symmetric_band
from fbma.otsuki import OtsukiSpec, enumerate_annuli, solve_parameter
from fbma.surface import SurfaceParams, big_c, f, gamma, immersion, period_T, phi, psi

__version__ = "0.1.0"

__all__ = [
    "AnnulusBand",
    "OtsukiSpec",
    "SurfaceParams",
    "big_c",
    "enumerate_annuli",
    "f",
    "find_f_zeros",
    "first_positive_zero",
    "gamma",
    "immersion",
    "period_T",
    "phi",
    "psi",
    "radius",
    "solve_parameter",
    "symmetric_band",
]
