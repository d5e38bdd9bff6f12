"""Exact homotopy-transfer engine for A-infinity and L-infinity structures."""

from .field import Field, QQ, GF, FieldError
from .graded import GradedBasis, GradedMap, StructureError, row_reduce
from .complexes import (
    AxiomError,
    ChainComplex,
    Contraction,
    WeakSystem,
    homology_contraction,
    trivial_contraction,
    verify_contraction,
    normalize_weak_system,
    hodge_split,
)

__version__ = "0.1.0"
