"""Primality proving through dual elliptic pseudoprime pairs and cyclotomy."""

from .zn import (
    CompositeWitness,
    FactorFound,
    jacobi,
    sqrt_mod,
    strong_pseudoprime,
    try_invert,
)
from .ec import CurveParams, division_poly, partial_add, scalar_mul
from .cm import QuadInt, QuadOrder, class_polynomial, cornacchia_split
from .dual import DualPair, search_dual
from .prover import ProveResult, prove
from .verifier import verify

__all__ = [
    "CompositeWitness",
    "CurveParams",
    "DualPair",
    "FactorFound",
    "ProveResult",
    "QuadInt",
    "QuadOrder",
    "class_polynomial",
    "cornacchia_split",
    "division_poly",
    "jacobi",
    "partial_add",
    "prove",
    "ProveResult",
    "scalar_mul",
    "search_dual",
    "sqrt_mod",
    "strong_pseudoprime",
    "try_invert",
    "verify",
]

__version__ = "0.1.0"
