"""Eigenvalue density and eigenvector nonorthogonality of complex symmetric
random matrices: exact finite-N laws, large-N limits and Monte-Carlo checks."""

from .ensembles import EnsembleKind, EnsembleSpec, derive_stream, sample, sample_goe, sample_haar_unit_vector
from .laws_asymptotic import (
    EnsembleTag,
    bulk_overlap_law,
    density_large_n,
    edge_overlap_law,
    edge_profile,
    refined_edge_factor,
)
from .laws_exact import (
    LawContext,
    g_factor,
    joint_density,
    law_context,
    overlap_cdf,
    overlap_density,
    overlap_density_origin,
    overlap_mean,
    radial_cdf,
    radial_density,
)
from .specfun import DomainError, QuadratureConvergenceError, QuadratureResult, integrate

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "EnsembleKind",
    "EnsembleSpec",
    "EnsembleTag",
    "LawContext",
    "QuadratureConvergenceError",
    "QuadratureResult",
    "bulk_overlap_law",
    "density_large_n",
    "derive_stream",
    "edge_overlap_law",
    "edge_profile",
    "g_factor",
    "integrate",
    "joint_density",
    "law_context",
    "overlap_cdf",
    "overlap_density",
    "overlap_density_origin",
    "overlap_mean",
    "radial_cdf",
    "radial_density",
    "refined_edge_factor",
    "sample",
    "sample_goe",
    "sample_haar_unit_vector",
]
