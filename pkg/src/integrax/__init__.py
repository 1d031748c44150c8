"""Exact matrix integrability, S-full integrals and plane-tree witness polynomials."""

from .errors import ConvergenceError, InputError, IntegraxError, NoSuchTreeError, RegimeError
from .matcore import (
    IntegralExtension,
    JordanSpec,
    RatMatrix,
    char_poly,
    construct_integral,
    is_integrable,
    jordan_matrix,
    min_poly,
    verify_integral,
)
from .polycore import FactoredPoly, MultiplicitySignature, RatPoly, Verdict, classify_signature, sfull_integral

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "FactoredPoly",
    "InputError",
    "IntegralExtension",
    "IntegraxError",
    "JordanSpec",
    "MultiplicitySignature",
    "NoSuchTreeError",
    "RatMatrix",
    "RatPoly",
    "RegimeError",
    "Verdict",
    "char_poly",
    "classify_signature",
    "construct_integral",
    "is_integrable",
    "jordan_matrix",
    "min_poly",
    "sfull_integral",
    "verify_integral",
]
