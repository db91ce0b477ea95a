"""Generalized Fibonacci polynomials: exact arithmetic, roots, orthogonality,
and the birth-and-death chains induced by Lucas-type families."""
from .errors import GfpError
from .gfp import GfpFamily, GfpKind, generate, lookup, registry, registry_table1, term
from .polycore import Polynomial

__version__ = "0.1.0"

__all__ = [
    "GfpError",
    "GfpFamily",
    "GfpKind",
    "Polynomial",
    "generate",
    "lookup",
    "registry",
    "registry_table1",
    "term",
    "__version__",
]
