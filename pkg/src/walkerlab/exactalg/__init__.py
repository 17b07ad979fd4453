"""Exact arithmetic over Q and one quadratic extension Q(sqrt d)."""
from .linalg import (
    Matrix,
    Subspace,
    char_poly,
    congruence_diagonalize,
    exterior_square,
    isotropic_vector,
    jordan_structure,
    kernel,
    BIVECTOR_PAIRS,
    plane_from_bivector,
    plucker_polar,
    plucker_quadric,
    poly_at_matrix,
    rref,
    signature,
    vec,
    wedge,
)
from .poly import (
    Factor,
    Poly,
    factor_over_field,
    product_of,
    quadratic_roots,
    split_real,
    squarefree_part,
    sturm_real_root_count,
)
from .scalar import ONE, ZERO, Scalar, radicand_of, sqrt_in_field, squarefree_split

__all__ = [
    "Scalar", "ZERO", "ONE", "radicand_of", "sqrt_in_field", "squarefree_split",
    "Poly", "Factor", "factor_over_field", "split_real", "sturm_real_root_count", "product_of",
    "quadratic_roots", "squarefree_part",
    "Matrix", "Subspace", "vec", "rref", "kernel", "char_poly", "poly_at_matrix",
    "jordan_structure", "exterior_square", "wedge", "plucker_quadric", "plucker_polar",
    "plane_from_bivector", "BIVECTOR_PAIRS", "congruence_diagonalize", "signature", "isotropic_vector",
]
