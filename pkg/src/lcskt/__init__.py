"""Exact computations for LCSKT structures on Lie algebras."""

from .complexgeo import ComplexStructure, InvalidParams, NilpotentFamilyParams, NonNilpotentFamilyParams
from .exterior import JacobiViolation, KForm, LieAlgebra
from .hermitian import Classification, HermitianStructure, NilpotentMetricParams, lcskt_solve
from .scalar import QSqrt2, Scalar

__version__ = "0.1.0"

__all__ = [
    "Classification",
    "ComplexStructure",
    "HermitianStructure",
    "InvalidParams",
    "JacobiViolation",
    "KForm",
    "LieAlgebra",
    "NilpotentFamilyParams",
    "NilpotentMetricParams",
    "NonNilpotentFamilyParams",
    "QSqrt2",
    "Scalar",
    "lcskt_solve",
]
