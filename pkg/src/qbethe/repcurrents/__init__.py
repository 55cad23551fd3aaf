"""Evaluation representations, half-currents, projections of current
strings, and the universal weight-function constructors."""

from .modules import (
    EvalModule,
    TensorModule,
    build_eval_module,
    load_registry,
    registry_payload,
)
from .currents import (
    half_current,
    interp_current,
    proj_composite,
    screening_action,
    string_projection,
)
from .weights import (
    WeightVector,
    coproduct_combine,
    symmetry_check,
    verify_projection_identity,
    weight_function,
)

__all__ = [
    "EvalModule",
    "TensorModule",
    "build_eval_module",
    "load_registry",
    "registry_payload",
    "half_current",
    "interp_current",
    "proj_composite",
    "screening_action",
    "string_projection",
    "WeightVector",
    "coproduct_combine",
    "symmetry_check",
    "verify_projection_identity",
    "weight_function",
]
