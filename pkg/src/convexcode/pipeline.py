"""Glue between the code, graph, labeling and geometry layers."""

from __future__ import annotations

from dataclasses import dataclass

from convexcode.code_core import NeuralCode, maximal_codewords
from convexcode.code_graph import (
    CycleReport,
    GcGraph,
    GridEmbedding,
    analyze_cycles,
    brute_force_embed,
    build_gc,
    embed_disjoint_cycles,
    embed_path_forest,
    is_path_forest,
    SearchBudgetExceeded,
)
from convexcode.geometry import TubeComplex, assemble
from convexcode.realization import Realization, realize


def auto_embedding(g: GcGraph, report: CycleReport | None = None) -> tuple[GridEmbedding | None, str]:
    """First drawing found by the path, cycle and exhaustive constructors, in that order."""
    report = report or analyze_cycles(g)
    if is_path_forest(g):
        return embed_path_forest(g), "path-forest"
    if report.D is not None:
        return embed_disjoint_cycles(g, report), "disjoint-cycles"
    if g.vertex_count <= 8 and not report.has_3_cycle:
        try:
            emb = brute_force_embed(g, d_max=3, box=g.vertex_count)
        except SearchBudgetExceeded:
            emb = None
        if emb is not None:
            return emb, "brute-force"
    return None, "none"


@dataclass
class Construction:
    realization: Realization
    graph: GcGraph
    cycles: CycleReport
    embedding: GridEmbedding
    method: str
    complex: TubeComplex


def construct(code: NeuralCode, embedding: GridEmbedding | None = None) -> Construction:
    """Label the circles for ``code`` and mount them on a grid drawing.

    Raises HypothesisViolated for codes outside the construction's hypotheses
    and LookupError when no drawing is available.
    """
    real = realize(code)
    g = build_gc(maximal_codewords(code))
    cycles = analyze_cycles(g)
    method = "user"
    if embedding is None:
        embedding, method = auto_embedding(g, cycles)
        if embedding is None:
            raise LookupError("no quasi-square-grid drawing found for G_C")
    tc = assemble(embedding, real.family, code)
    return Construction(real, g, cycles, embedding, method, tc)
