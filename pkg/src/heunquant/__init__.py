"""Quantization of modified biconfluent Heun polynomials.

Exact characteristic polynomials for the accessory parameter, certified
real roots, spectra over (N, L) grids, shooting demonstrations, surface
fits and large-z growth checks.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .charpoly import CharPolynomial, Mode, QuantizationProblem, build_charpoly, degree_bound
from .core import (ModifiedBCHParams, PhysicalParams, ScaledParams, SeriesCoefficients,
                   map_cornell, map_quark, map_scaled, series_coefficients)
from .rootfind import RootEnclosure, RootSet, find_roots, isolate_real_roots, refine_root
from .spectrum import (SpectrumEntry, compute_entry, eigenfunction, eigenvalue, enumerate_spectrum,
                       gap_table, select_root)

__all__ = [
    "CharPolynomial", "Mode", "QuantizationProblem", "build_charpoly", "degree_bound",
    "ModifiedBCHParams", "PhysicalParams", "ScaledParams", "SeriesCoefficients",
    "map_cornell", "map_quark", "map_scaled", "series_coefficients",
    "RootEnclosure", "RootSet", "find_roots", "isolate_real_roots", "refine_root",
    "SpectrumEntry", "compute_entry", "eigenfunction", "eigenvalue", "enumerate_spectrum",
    "gap_table", "select_root",
]
