"""Finite stages of the index set, d-vectors, coordinates and extensions."""

from .dvector import CoordEvaluator, DVector, eval_coord, project_d
from .extension import coords_of, materialize_extension, restrict, unit_coords
from .generation import Caps, GenerationSet, enumerate_pruned, grow_generation
from .nodes import (ATOM, BDParams, GammaNode, ValidationReport, filler, make_node,
                    parse_node, validate_node)


def canonical_order(a: GammaNode, b: GammaNode) -> int:
    """-1, 0 or 1 as ``a`` precedes, equals or follows ``b``."""
    if a.id == b.id:
        return 0
    return -1 if a.key < b.key else 1


__all__ = [
    "ATOM", "BDParams", "Caps", "CoordEvaluator", "DVector", "GammaNode", "GenerationSet",
    "ValidationReport", "canonical_order", "coords_of", "enumerate_pruned", "eval_coord",
    "filler", "grow_generation", "make_node", "materialize_extension", "parse_node",
    "project_d", "restrict", "unit_coords", "validate_node",
]
