"""Exact rational CDGA workbench: odd spherical fibrations, killing towers,
Sullivan minimal models and injectivity checks."""

from __future__ import annotations

from .algebra import DGAlgebra, Element, Morphism, validate, validate_morphism
from .cohomology import CohomologyClass, ValidationError, betti, class_coordinates, cohomology_basis, is_exact
from .dgafile import DgaError, dumps, parse, parse_file
from .fibration import (
    Fibration,
    FiniteUpTo,
    NonzeroNearCutoff,
    attach_odd_sphere,
    build_tower,
    fiber_dimension_probe,
    finite_subtower,
    gysin_verify,
)
from .minimal import (
    BouquetSpec,
    PreconditionError,
    ResourceBoundExceeded,
    UnsupportedTarget,
    build_phi_k,
    compare_models,
    free_lie_dimensions,
    minimal_model,
    psi_to_sphere,
    truncate,
    truncation_gap_check,
    verify_odd_bouquet_model,
)
from .verify import (
    SearchSpace,
    injectivity_check,
    injectivity_pipeline,
    lift_fibration,
    search_killing_fibrations,
    sphere_engine,
)

__all__ = [
    "DGAlgebra",
    "Element",
    "Morphism",
    "validate",
    "validate_morphism",
    "CohomologyClass",
    "ValidationError",
    "betti",
    "class_coordinates",
    "cohomology_basis",
    "is_exact",
    "DgaError",
    "dumps",
    "parse",
    "parse_file",
    "Fibration",
    "FiniteUpTo",
    "NonzeroNearCutoff",
    "attach_odd_sphere",
    "build_tower",
    "fiber_dimension_probe",
    "finite_subtower",
    "gysin_verify",
    "BouquetSpec",
    "PreconditionError",
    "ResourceBoundExceeded",
    "UnsupportedTarget",
    "build_phi_k",
    "compare_models",
    "free_lie_dimensions",
    "minimal_model",
    "psi_to_sphere",
    "truncate",
    "truncation_gap_check",
    "verify_odd_bouquet_model",
    "SearchSpace",
    "injectivity_check",
    "injectivity_pipeline",
    "lift_fibration",
    "search_killing_fibrations",
    "sphere_engine",
]
