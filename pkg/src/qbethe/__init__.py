"""Exact-arithmetic engine for universal weight functions of quantum
affine sl2 and sl3: rational kernels, current projections on evaluation
modules, and independent six-vertex / Bethe-vector oracles."""

from .exactarith import (
    MRat,
    QScalar,
    SpectralVar,
    VarContext,
    mrat_equal,
    qscalar_normalize,
    svar,
    tvar,
    uvar,
    wvar,
    zvar,
)

__all__ = [
    "MRat",
    "QScalar",
    "SpectralVar",
    "VarContext",
    "mrat_equal",
    "qscalar_normalize",
    "svar",
    "tvar",
    "uvar",
    "wvar",
    "zvar",
]

__version__ = "0.1.0"
