"""Nondegenerate boundary-format tensors: nondegeneracy, jumping hyperplanes,
identity tensors and the classification of Stab(A)^0."""

__version__ = "0.1.0"
SCHEMA_VERSION = 1

from .tensor import (BoundaryTensor, Format, GroupElement, act, contract0, flatten,  # noqa: E402
                     parse_format, residual_rank_one, tensor_from_json, tensor_to_json)
from .sl2 import build_identity, canonicalize_identity, embed, make_vandermonde  # noqa: E402
from .nondegeneracy import fiber_map, hyperdet_p2, nondegenerate  # noqa: E402
from .stabilizer import classify, stab_algebra  # noqa: E402
from .jumping import (detect_strong, detect_weak, elementary_transform,  # noqa: E402
                      strong_direction_locus, weak_locus_inclusion_check)
from .fixtures import FixtureSpec, generate  # noqa: E402

__all__ = [
    "BoundaryTensor", "Format", "GroupElement", "act", "contract0", "flatten", "parse_format",
    "residual_rank_one", "tensor_from_json", "tensor_to_json", "build_identity",
    "canonicalize_identity", "embed", "make_vandermonde", "fiber_map", "hyperdet_p2",
    "nondegenerate", "classify", "stab_algebra", "detect_strong", "detect_weak",
    "elementary_transform", "strong_direction_locus", "weak_locus_inclusion_check",
    "FixtureSpec", "generate",
]
