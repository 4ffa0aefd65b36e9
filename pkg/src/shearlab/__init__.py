"""Shear-constructed harmonic mappings and numerical univalence criteria."""

__version__ = "0.1.0"

from .catalog import catalog_dilatation, catalog_map, compose
from .criteria import (
    alpha_bound_convex_f_alpha,
    alpha_bound_f_alpha,
    alpha_bound_lif,
    alpha_bound_shs,
    becker_check,
    delta_beta,
    linear_connectivity_bound,
    shcc_constants,
    theorem_c_check,
)
from .grid import DiscGrid
from .harmonic import HarmonicMap, shear, transform_F_alpha, transform_f_alpha
from .series import TruncatedSeries
from .verify import consistency_matrix, injectivity_sample

__all__ = [
    "DiscGrid",
    "HarmonicMap",
    "TruncatedSeries",
    "alpha_bound_convex_f_alpha",
    "alpha_bound_f_alpha",
    "alpha_bound_lif",
    "alpha_bound_shs",
    "becker_check",
    "catalog_dilatation",
    "catalog_map",
    "compose",
    "consistency_matrix",
    "delta_beta",
    "injectivity_sample",
    "linear_connectivity_bound",
    "shcc_constants",
    "shear",
    "theorem_c_check",
    "transform_F_alpha",
    "transform_f_alpha",
]
