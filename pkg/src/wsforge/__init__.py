"""Chord and Jacobi diagrams, their Hopf algebra, and the sl2 and Conway
weight systems, with exact arithmetic throughout."""

__version__ = "0.1.0"

from .diagrams import (
    CanonicalKey,
    DiagramError,
    FeynmanDiagram,
    ResourceLimitError,
    analyze,
    canonicalize,
    chord_diagram,
    construct,
    feynman,
    from_key,
    parse,
    parse_file,
    theta,
    wheel,
)
from .hopf import coproduct, hanging_tree_reduce, is_primitive, primitive_basis, product
from .lie_tensor import CenterPolynomial, contract, gl11, sl2, universal, validate
from .span_reduce import LinearCombination, SpaceSpec, basis, normal_form, stu_resolve
from .weight_systems import (
    deframed_sl2,
    eval_conway,
    eval_sl2,
    eval_sl2_oracle,
    tilde_v,
    verify_conway_relations,
)

__all__ = [
    "CanonicalKey",
    "CenterPolynomial",
    "DiagramError",
    "FeynmanDiagram",
    "LinearCombination",
    "ResourceLimitError",
    "SpaceSpec",
    "analyze",
    "basis",
    "canonicalize",
    "chord_diagram",
    "construct",
    "contract",
    "coproduct",
    "deframed_sl2",
    "eval_conway",
    "eval_sl2",
    "eval_sl2_oracle",
    "feynman",
    "from_key",
    "gl11",
    "hanging_tree_reduce",
    "is_primitive",
    "normal_form",
    "parse",
    "parse_file",
    "primitive_basis",
    "product",
    "sl2",
    "stu_resolve",
    "theta",
    "tilde_v",
    "universal",
    "validate",
    "verify_conway_relations",
    "wheel",
]
