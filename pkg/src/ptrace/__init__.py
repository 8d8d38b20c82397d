"""Partial traces on exact rational matrix categories.

Submodules: :mod:`ratlin` (exact linear algebra), :mod:`vectcat` (the trace
operators), :mod:`axioms` (Kleene-semantics axiom checks), :mod:`paracat`
(paths and paracategories), :mod:`intp` (the partial Int construction),
:mod:`pathcomp` (the path-category completion) and :mod:`cli`.
"""

from .kleene import Undefined, bind, is_defined, kleene_eq, kleene_leq
from .ratlin import DimensionError, Matrix

__all__ = [
    "DimensionError",
    "Matrix",
    "Undefined",
    "bind",
    "is_defined",
    "kleene_eq",
    "kleene_leq",
]

__version__ = "0.1.0"
