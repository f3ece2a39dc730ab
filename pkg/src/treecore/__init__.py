"""Cores of products of Bass-Serre trees of one-edge splittings of free groups."""
from .bass_serre import AMALGAM, HNN, Cell, DirectionRef, Splitting, SplittingError
from .corecomplex import (BOUNDS, EXACT, FALSE, TRUE, UNKNOWN, Budget, CoreComplex,
                          compute_core, detect_twice_light, emptiness_check,
                          intersection_number, is_compatible, scott_crossing)
from .lineactions import LatticeHom, abelian_core_covolume, classify_empty, lattice_index
from .minsubtree import min_subtree_quotient, strong_intersection
from .product import BudgetExceeded

__all__ = [
    "AMALGAM", "HNN", "Cell", "DirectionRef", "Splitting", "SplittingError",
    "BOUNDS", "EXACT", "FALSE", "TRUE", "UNKNOWN", "Budget", "CoreComplex",
    "compute_core", "detect_twice_light", "emptiness_check", "intersection_number",
    "is_compatible", "scott_crossing", "LatticeHom", "abelian_core_covolume",
    "classify_empty", "lattice_index", "min_subtree_quotient", "strong_intersection",
    "BudgetExceeded",
]
