"""Exact computations for involutive and cyclic A-infinity structures."""

from .ainfty import AInftyMorphism, AInftyStructure, validate
from .cohom import cohomology_dims, cyclic_complex, dihedral_complexes, hochschild_complex
from .deform import NilpotentRing, RElement, bch, gauge_action, infinitesimal_moduli, mc_check
from .exactnum import GF, Fp, Matrix, Q
from .graded import BilinearForm, GradedSpace, StructureError

__version__ = "0.1.0"

__all__ = [
    "AInftyMorphism",
    "AInftyStructure",
    "BilinearForm",
    "Fp",
    "GF",
    "GradedSpace",
    "Matrix",
    "NilpotentRing",
    "Q",
    "RElement",
    "StructureError",
    "bch",
    "cohomology_dims",
    "cyclic_complex",
    "dihedral_complexes",
    "gauge_action",
    "hochschild_complex",
    "infinitesimal_moduli",
    "mc_check",
    "validate",
]
