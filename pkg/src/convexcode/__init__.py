"""Convex realizations of combinatorial neural codes over quasi-square grids."""

from convexcode.code_core import (
    CodeWord,
    MeetTable,
    NeuralCode,
    compute_constants,
    dimension_bound,
    is_max_intersection_complete,
    is_strongly_mic,
    maximal_codewords,
    parse_code,
    restrict,
)
from convexcode.code_graph import (
    GcGraph,
    GridEmbedding,
    analyze_cycles,
    brute_force_embed,
    build_gc,
    embed_disjoint_cycles,
    embed_path_forest,
    validate_embedding,
)
from convexcode.geometry import TubeComplex, assemble, convexity_check, sample_code, verify
from convexcode.pipeline import construct
from convexcode.realization import (
    build_circles,
    check_output_properties,
    plan_groups,
    propagate,
    realize,
)

__all__ = [
    "CodeWord", "MeetTable", "NeuralCode", "compute_constants", "dimension_bound",
    "is_max_intersection_complete", "is_strongly_mic", "maximal_codewords", "parse_code", "restrict",
    "GcGraph", "GridEmbedding", "analyze_cycles", "brute_force_embed", "build_gc",
    "embed_disjoint_cycles", "embed_path_forest", "validate_embedding",
    "TubeComplex", "assemble", "convexity_check", "sample_code", "verify", "construct",
    "build_circles", "check_output_properties", "plan_groups", "propagate", "realize",
]
