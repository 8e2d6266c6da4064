"""Discrete exterior calculus on cubic complexes and the discrete torus."""

from .chains import Chain, Cochain, discretize, evaluate, pairing
from .complex import (CubicComplex, OrientedCube, OrientedSimplex, boundary_cube,
                      boundary_simplex, dual_cell, faces, make_simplex,
                      simplicial_decomposition, validate_complex)
from .errors import DECError
from .hodge import decompose, harmonic_basis_1forms, harmonic_dimension
from .operators import (apply_d, apply_delta, assemble_boundary, build_operators,
                        hodge_star, inner_product, laplacian)
from .torus import TorusMesh, build_torus

__version__ = "0.1.0"

__all__ = [
    "Chain", "Cochain", "CubicComplex", "DECError", "OrientedCube", "OrientedSimplex",
    "TorusMesh", "apply_d", "apply_delta", "assemble_boundary", "boundary_cube",
    "boundary_simplex", "build_operators", "build_torus", "decompose", "discretize",
    "dual_cell", "evaluate", "faces", "harmonic_basis_1forms", "harmonic_dimension",
    "hodge_star", "inner_product", "laplacian", "make_simplex", "pairing",
    "simplicial_decomposition", "validate_complex",
]
