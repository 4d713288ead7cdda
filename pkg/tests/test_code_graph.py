import random

import networkx as nx
import pytest

from convexcode.code_core import NeuralCode, maximal_codewords
from convexcode.code_graph import (
    GcGraph,
    GridEmbedding,
    NotAPathForest,
    analyze_cycles,
    best_embedding,
    brute_force_embed,
    build_gc,
    embed_disjoint_cycles,
    embed_path_forest,
    is_path_forest,
    validate_embedding,
)
from convexcode.corpus import corpus


def path(n):
    return GcGraph.from_edges(n, [(k, k + 1) for k in range(n - 1)])


def cycle(n):
    return GcGraph.from_edges(n, [(k, (k + 1) % n) for k in range(n)])


TRIANGLE = cycle(3)


def test_build_gc_c2(c2):
    g = build_gc(maximal_codewords(c2))
    assert g.vertex_count == 2 and g.edges == {(0, 1)}


def test_build_gc_needs_nonempty_meet():
    g = build_gc(maximal_codewords(NeuralCode(["12", "34"])))
    assert g.edges == frozenset()


def test_bad_edge_rejected():
    with pytest.raises(ValueError):
        GcGraph.from_edges(2, [(0, 2)])


def test_components_and_degree():
    g = GcGraph.from_edges(5, [(0, 1), (1, 2), (3, 4)])
    assert g.components() == [[0, 1, 2], [3, 4]]
    assert g.degree(1) == 2 and g.neighbors(1) == [0, 2]


def test_cycles_of_triangle():
    rep = analyze_cycles(TRIANGLE)
    assert rep.has_3_cycle and rep.triangle == (0, 1, 2) and rep.D is None


def test_four_cycle_reports_d_and_embedding():
    g = cycle(4)
    rep = analyze_cycles(g)
    assert not rep.has_3_cycle and rep.pairwise_disjoint
    assert rep.D == 3
    emb = embed_disjoint_cycles(g, rep)
    assert emb.d == 2
    assert validate_embedding(g, emb) == []


def test_tree_d_formula():
    star = GcGraph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    assert analyze_cycles(star).D == 2 + 4
    assert analyze_cycles(path(3)).D == 5


def test_two_cycles_joined_by_bridge():
    edges = [(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5), (5, 6), (6, 7), (7, 4)]
    g = GcGraph.from_edges(8, edges)
    rep = analyze_cycles(g)
    assert rep.pairwise_disjoint and len(rep.cycles) == 2
    assert rep.D == 2 + 8 + 2 - 8
    assert validate_embedding(g, embed_disjoint_cycles(g, rep)) == []


def test_cycles_sharing_vertex_not_disjoint():
    edges = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5), (5, 6), (6, 0)]
    rep = analyze_cycles(GcGraph.from_edges(7, edges))
    assert not rep.pairwise_disjoint and rep.D is None


def test_path_forest_detection():
    assert is_path_forest(path(5))
    assert is_path_forest(GcGraph.from_edges(3, []))
    assert not is_path_forest(cycle(4))
    assert not is_path_forest(GcGraph.from_edges(4, [(0, 1), (0, 2), (0, 3)]))
    with pytest.raises(NotAPathForest):
        embed_path_forest(cycle(4))


def test_path_forest_small_cases():
    assert embed_path_forest(GcGraph.from_edges(1, [])).d == 0
    emb = embed_path_forest(GcGraph.from_edges(2, []))
    assert emb.d == 1 and emb.coords == {0: (0,), 1: (2,)}


def _random_path_forest(rng, n):
    order = list(range(n))
    rng.shuffle(order)
    edges = [(a, b) for a, b in zip(order, order[1:]) if rng.random() < 0.7]
    return GcGraph.from_edges(n, edges)


@pytest.mark.parametrize("n", range(1, 51))
def test_path_forest_embedding_valid(n):
    rng = random.Random(n)
    for _ in range(3):
        g = _random_path_forest(rng, n)
        emb = embed_path_forest(g)
        assert validate_embedding(g, emb) == []
        assert emb.d == (0 if n == 1 else 1)


def test_validator_catches_each_rule():
    g = path(3)
    bad = {
        "duplicate coordinates": {0: (0, 0), 1: (0, 0), 2: (1, 0)},
        "not axis-aligned": {0: (0, 0), 1: (1, 1), 2: (1, 2)},
        "intermediate vertex on edge": {0: (0, 0), 1: (2, 0), 2: (1, 0)},
    }
    for kind, coords in bad.items():
        kinds = {v.kind for v in validate_embedding(g, GridEmbedding(2, coords))}
        assert kind in kinds
    assert validate_embedding(g, GridEmbedding(2, {0: (0, 0)}))[0].kind == "missing coordinates"
    assert validate_embedding(g, GridEmbedding(2, {0: (0,), 1: (1, 0), 2: (2, 0)}))[0].kind == "wrong dimension"


def test_validator_crossing_and_separation():
    g = GcGraph.from_edges(4, [(0, 1), (2, 3)])
    cross = GridEmbedding(2, {0: (0, 1), 1: (2, 1), 2: (1, 0), 3: (1, 2)})
    assert "edges cross" in {v.kind for v in validate_embedding(g, cross)}
    close = GridEmbedding(1, {0: (0,), 1: (1,), 2: (2,), 3: (3,)})
    assert "components too close" in {v.kind for v in validate_embedding(g, close)}
    apart = GridEmbedding(1, {0: (0,), 1: (1,), 2: (3,), 3: (4,)})
    assert validate_embedding(g, apart) == []


def test_embedding_json_round_trip(tmp_path):
    emb = embed_disjoint_cycles(cycle(5))
    p = tmp_path / "e.json"
    import json
    p.write_text(json.dumps(emb.to_json()))
    assert GridEmbedding.load(p) == emb


@pytest.mark.parametrize("d_max", [1, 2, 3])
@pytest.mark.parametrize("box", [1, 2, 3, 4])
def test_brute_force_triangle_impossible(d_max, box):
    assert brute_force_embed(TRIANGLE, d_max, box) is None


def test_brute_force_finds_lex_least_path():
    emb = brute_force_embed(path(3), 2, 3)
    assert emb.d == 1 and emb.coords == {0: (0,), 1: (1,), 2: (2,)}


def test_brute_force_four_cycle_needs_two_axes():
    emb = brute_force_embed(cycle(4), 3, 2)
    assert emb.d == 2 and validate_embedding(cycle(4), emb) == []


def test_best_embedding_prefers_lowest_dimension():
    star = GcGraph.from_edges(3, [(0, 1), (0, 2)])
    assert best_embedding(star).d == 1
    assert best_embedding(TRIANGLE) is None


def _random_triangle_graph(rng):
    n = rng.randint(3, 8)
    edges = {(0, 1), (1, 2), (0, 2)}
    for _ in range(rng.randint(0, 8)):
        a, b = rng.sample(range(n), 2)
        edges.add((min(a, b), max(a, b)))
    perm = list(range(n))
    rng.shuffle(perm)
    return GcGraph.from_edges(n, [(perm[a], perm[b]) for a, b in edges])


def test_random_graphs_with_triangles_flagged():
    rng = random.Random(5)
    for _ in range(200):
        rep = analyze_cycles(_random_triangle_graph(rng))
        assert rep.has_3_cycle and rep.D is None


def _random_cactus(rng):
    """Disjoint cycles of length >= 4 hung on a random tree, plus leaves."""
    edges, n = [], 0
    anchors = []
    for _ in range(rng.randint(1, 3)):
        length = rng.randint(4, 7)
        verts = list(range(n, n + length))
        edges += [(verts[k], verts[(k + 1) % length]) for k in range(length)]
        if anchors:
            a = rng.choice(anchors)
            edges.append((a, n + length))
            edges.append((n + length, rng.choice(verts)))
            anchors.append(n + length)
            n += 1
        anchors += verts
        n += length
    for _ in range(rng.randint(0, 4)):
        edges.append((rng.randrange(n), n))
        n += 1
    return GcGraph.from_edges(n, edges)


def test_cactus_embeddings_and_d_against_networkx():
    rng = random.Random(9)
    for _ in range(100):
        g = _random_cactus(rng)
        rep = analyze_cycles(g)
        G = nx.Graph(list(g.edges))
        G.add_nodes_from(range(g.vertex_count))
        basis = nx.cycle_basis(G)
        assert sorted(sorted(c) for c in basis) == sorted(sorted(c) for c in rep.cycles)
        on_cycle = len({v for c in basis for v in c})
        assert rep.D == 2 + g.vertex_count + len(basis) - on_cycle
        emb = embed_disjoint_cycles(g, rep)
        assert validate_embedding(g, emb) == []
        assert emb.d <= rep.D - 2 or rep.D == 3


def test_degree_at_most_twice_dimension():
    rng = random.Random(2)
    for _ in range(50):
        g = _random_cactus(rng)
        emb = embed_disjoint_cycles(g)
        assert all(g.degree(v) <= 2 * emb.d for v in range(g.vertex_count))


def test_corpus_graphs_embed():
    for code in corpus(100, seed=4):
        g = build_gc(maximal_codewords(code))
        rep = analyze_cycles(g)
        if rep.D is not None and not is_path_forest(g):
            assert validate_embedding(g, embed_disjoint_cycles(g, rep)) == []
        assert best_embedding(g, rep) is not None
