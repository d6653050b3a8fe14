"""Cohomology of one-dimensional mixed substitution tiling spaces."""

from .analysis import (Decision, is_family_primitive, is_pair_primitive, is_primitive,
                       is_self_correcting, max_rank_substitution)
from .apcomplex import (BondingMaps, CellComplex, ComplexError, SystemAtPosition, bonding_maps,
                        build_complex, build_tower, coboundary_matrix, export_complex,
                        parse_complex_json)
from .cohomology import (GroupDescriptor, LimitSystem, direct_limit, h0, h1, rank_bound_report)
from .words import (Alphabet, ParseError, SequenceSpec, Substitution, SubstitutionFamily, apply,
                    common_left_pf, compose, legal_words, parse_system, pf_data, power,
                    substitution_matrix)
from .zmatrix import IntMatrix, cokernel, snf

__version__ = "0.1.0"

__all__ = [
    "Alphabet", "BondingMaps", "CellComplex", "ComplexError", "Decision", "GroupDescriptor",
    "IntMatrix", "LimitSystem", "ParseError", "SequenceSpec", "Substitution",
    "SubstitutionFamily", "SystemAtPosition", "apply", "bonding_maps", "build_complex",
    "build_tower", "coboundary_matrix", "cokernel", "common_left_pf", "compose", "direct_limit",
    "export_complex", "h0", "h1", "is_family_primitive", "is_pair_primitive", "is_primitive",
    "is_self_correcting", "legal_words", "max_rank_substitution", "parse_complex_json",
    "parse_system", "pf_data", "power", "rank_bound_report", "snf", "substitution_matrix",
]
