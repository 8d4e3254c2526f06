"""Exact arithmetic in the Bruhat-Tits building of SL_n over Q with a p-adic valuation."""

from .building import (ChamberPoint, LatticeClass, canonicalize_lattice, cartan_decompose,
                       iwasawa_decompose, smith_invariants, vertex_coords)
from .errors import BTError
from .limits import LimitGroupDescriptor, member, normalizer, same_group
from .matrix import Matrix
from .scalar import INF, ScalarConfig, valuation
from .sequences import SequenceSpec, classify

__version__ = "0.1.0"

__all__ = [
    "BTError", "ChamberPoint", "INF", "LatticeClass", "LimitGroupDescriptor", "Matrix", "ScalarConfig",
    "SequenceSpec", "canonicalize_lattice", "cartan_decompose", "classify", "iwasawa_decompose", "member",
    "normalizer", "same_group", "smith_invariants", "valuation", "vertex_coords",
]
