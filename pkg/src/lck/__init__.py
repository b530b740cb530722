"""Verification toolkit for locally conformally Kähler Lie algebras."""

from .lie import LieAlgebra, JacobiError, check_jacobi
from .exterior import AlternatingForm, InnerProduct, MetricError
from .hermitian import (CompatibilityError, ComplexStructureError, HermitianStructure,
                        check_lck, classify_J, is_vaisman, scalar_curvature)

__all__ = [
    "AlternatingForm", "CompatibilityError", "ComplexStructureError", "HermitianStructure",
    "InnerProduct", "JacobiError", "LieAlgebra", "MetricError", "check_jacobi", "check_lck",
    "classify_J", "is_vaisman", "scalar_curvature",
]
__version__ = "0.1.0"
