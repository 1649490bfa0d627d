"""Plain (non-secret) exact algebra over GF(q) and the reference oracles."""

from .extfield import ExtField, ExtFieldElement, ext_field_arith
from .field import GF, FieldElement, field_arith, is_prime
from .matrix import (
    Matrix,
    PolyMatrix,
    berkowitz_charpoly,
    det_cofactor,
    det_cofactor_polymat,
    det_reference_field,
    det_reference_polymat,
    lagrange_basis,
    lagrange_interpolate,
    polymatrix_eval,
)
from .poly import Polynomial, irreducible_poly, is_irreducible, poly_gcd, poly_mul, poly_xgcd
from .series import TruncSeries, series_ops

__all__ = [
    "GF",
    "FieldElement",
    "field_arith",
    "is_prime",
    "Polynomial",
    "poly_mul",
    "poly_gcd",
    "poly_xgcd",
    "is_irreducible",
    "irreducible_poly",
    "TruncSeries",
    "series_ops",
    "Matrix",
    "PolyMatrix",
    "det_reference_field",
    "det_reference_polymat",
    "det_cofactor",
    "det_cofactor_polymat",
    "berkowitz_charpoly",
    "polymatrix_eval",
    "lagrange_interpolate",
    "lagrange_basis",
    "ExtField",
    "ExtFieldElement",
    "ext_field_arith",
]
