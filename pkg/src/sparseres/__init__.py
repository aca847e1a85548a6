"""Sparse resultant matrices and eigenvalue-based polynomial system solving."""
from ._accel import USE_NUMBA, backend_name
from .poly import (HiddenSystem, LaurentPolynomial, PolySystem, UAugmentedSystem, UniPoly,
                   add_u_polynomial, hide_variable)
from .polytope import Polytope, convex_hull, lattice_points, minkowski_sum, volume
from .resultant import ResultantMatrix, build_matrix, degree_report, export_matrix, import_matrix
from .solver import SolveResult, SolverConfig, solve_hidden, solve_u
from .subdivision import mixed_subdivision, mixed_volume, mixed_volume_ie, stable_mixed_volume
from .sysio import ParseError, parse_system, read_system, serialize_system

__version__ = "0.1.0"

__all__ = [
    "USE_NUMBA", "backend_name", "HiddenSystem", "LaurentPolynomial", "PolySystem", "UAugmentedSystem",
    "UniPoly", "add_u_polynomial", "hide_variable", "Polytope", "convex_hull", "lattice_points",
    "minkowski_sum", "volume", "ResultantMatrix", "build_matrix", "degree_report", "export_matrix",
    "import_matrix", "SolveResult", "SolverConfig", "solve_hidden", "solve_u", "mixed_subdivision",
    "mixed_volume", "mixed_volume_ie", "stable_mixed_volume", "ParseError", "parse_system",
    "read_system", "serialize_system",
]
