"""Acceptance criteria 1 to 8. Run with ``pytest tests/test_acceptance.py -s`` to see the summary lines."""

import itertools
import json
import random
import time

import pytest

from convexcode.cli import analyze, main
from convexcode.code_core import CodeWord, NeuralCode, compute_constants, dimension_bound, maximal_codewords
from convexcode.code_graph import (
    GcGraph,
    HypothesisViolated,
    analyze_cycles,
    brute_force_embed,
    build_gc,
    embed_disjoint_cycles,
    embed_path_forest,
    is_path_forest,
    validate_embedding,
)
from convexcode.corpus import corpus
from convexcode.geometry import verify
from convexcode.pipeline import construct
from convexcode.realization import PropagationConflict, check_hypotheses, check_output_properties, realize

C2 = NeuralCode("1234 12 2 124 234 134 34 4 345 5 45".split())
C0 = NeuralCode(["12", "23"])


@pytest.fixture(scope="module")
def full_corpus():
    codes = corpus(200, seed=0)
    assert len(codes) == 200
    return codes


def report(number, ok, detail):
    print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")


def run(number, check):
    t0 = time.perf_counter()
    try:
        detail = check()
    except Exception as exc:
        report(number, False, f"{type(exc).__name__}: {exc}")
        raise
    report(number, True, f"{detail} ({time.perf_counter() - t0:.3f} s)")


def test_criterion_1_constants():
    def check():
        best = float("inf")
        for _ in range(5):
            t0 = time.perf_counter()
            k = compute_constants(C2)
            best = min(best, time.perf_counter() - t0)
        assert (k.s_prime, k.sigma_size, k.k1, k.k2, k.r) == (1, 1, 2, 2, 8)
        assert best < 0.010
        return "s'=1 |sigma|=1 k1=2 k2=2 r=8"
    run(1, check)


STEPS = {
    "step6": ("12 2 - - - - - -", "- - - - - - - -", "5 - - - - - - -"),
    "step7": ("12 2 - - - - - -", "- - - - - 4 4 4", "5 - - - - - - -"),
    "step8": ("12 2 - 234 134 - - -", "- - - - - 4 4 4", "5 - - - - - - -"),
    "step9": ("12 2 - 234 134 - - 124", "- - - - - 4 4 4", "5 - - - - - - 45"),
    "pass1": ("12 2 - 234 134 4 4 124", "- - - 34 34 4 4 4", "5 - - - - 4 4 45"),
    "pass2": ("12 2 - 234 134 4 4 124", "- - - 34 34 4 4 4", "5 - - 34 34 4 4 45"),
}


def _row(text):
    return [None if t == "-" else CodeWord.parse(t) for t in text.split()]


def test_criterion_2_labeling():
    def check():
        realize(C2, trace=True)
        t0 = time.perf_counter()
        real = realize(C2, trace=True)
        elapsed = time.perf_counter() - t0
        states = dict(real.trace)
        for step, (s1, s12, s2) in STEPS.items():
            assert states[step][(0,)] == _row(s1), step
            assert states[step][(0, 1)] == _row(s12), step
            assert states[step][(1,)] == _row(s2), step
        fam = real.family
        assert [str(fam[f].interior) for f in [(0,), (0, 1), (1,)]] == ["1234", "34", "345"]
        assert fam.snapshot() == {(0,): _row(STEPS["pass2"][0]), (0, 1): _row(STEPS["pass2"][1]),
                                  (1,): _row(STEPS["pass2"][2])}
        assert elapsed < 0.050
        return "six pinned states and final circles match"
    run(2, check)


def test_criterion_3_output_properties(full_corpus):
    def check():
        t0 = time.perf_counter()
        for code in [C2] + full_corpus:
            mt = maximal_codewords(code)
            assert mt.s <= 5 and code.n <= 12
            g = build_gc(mt)
            assert is_path_forest(g) or analyze_cycles(g).D is not None
            try:
                real = realize(code)
            except PropagationConflict as exc:
                raise AssertionError(f"conflict on {sorted(map(str, code))}: {exc}")
            rep = check_output_properties(real.family, code, mt)
            assert rep.ok, (sorted(map(str, code)), rep.witnesses)
        assert time.perf_counter() - t0 < 30
        return f"(a)-(d) hold on the example and {len(full_corpus)} corpus codes"
    run(3, check)


def test_criterion_4_geometry(full_corpus):
    def check():
        t0 = time.perf_counter()
        tc = construct(C2).complex
        assert tc.dim == 3
        res = verify(tc, samples=10_000, pairs=2000, seed=0)
        assert res.recovered_code == set(C2.words) | {CodeWord()}
        assert res.convexity_violations == []
        pairs = res.pairs_tested
        for code in full_corpus:
            res = verify(construct(code).complex, samples=10_000, pairs=2000, seed=0)
            assert res.passed, (sorted(map(str, code)), res.to_json())
            pairs += res.pairs_tested
        assert time.perf_counter() - t0 < 60
        return f"example and {len(full_corpus)} corpus complexes recovered, {pairs} midpoints convex"
    run(4, check)


def test_criterion_5_bounds():
    def check():
        rep = dimension_bound(C2)
        assert rep.best == 2 and rep.bound_for("quasi-square-grid") == 3
        assert rep.bound_for("max-intersection-complete") == 2
        rep = dimension_bound(NeuralCode(["12", "34", "1", "3"]))
        assert rep.best == 2 and rep.bound_for("disjoint-maximal") == 2
        assert dimension_bound(C0).applicable == []
        return "example -> 2 (grid entry 3), disjoint maximal -> 2, pair code -> none"
    run(5, check)


def _all_path_forests(n):
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        edges = [p for k, p in enumerate(pairs) if mask >> k & 1]
        g = GcGraph.from_edges(n, edges)
        if is_path_forest(g):
            yield g


def test_criterion_6_embeddings(full_corpus):
    def check():
        count = 0
        for n in range(1, 7):
            for g in _all_path_forests(n):
                assert validate_embedding(g, embed_path_forest(g)) == []
                count += 1
        rng = random.Random(0)
        for n in range(7, 51):
            for _ in range(20):
                order = list(range(n))
                rng.shuffle(order)
                g = GcGraph.from_edges(n, [(a, b) for a, b in zip(order, order[1:]) if rng.random() < 0.8])
                assert validate_embedding(g, embed_path_forest(g)) == []
                count += 1
        cactus = 0
        for code in full_corpus:
            g = build_gc(maximal_codewords(code))
            rep = analyze_cycles(g)
            if rep.cycles:
                assert validate_embedding(g, embed_disjoint_cycles(g, rep)) == []
                cactus += 1
        square = GcGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        rep = analyze_cycles(square)
        assert (rep.D, embed_disjoint_cycles(square, rep).d) == (3, 2)
        sq_code = NeuralCode(["125", "236", "347", "148", "2", "3", "4", "1"])
        out = analyze(sq_code)
        assert (out["graph"]["D"], out["graph"]["d_emb"]) == (3, 2)
        assert cactus > 0
        return f"{count} path forests, {cactus} corpus cycle graphs valid; 4-cycle reports D=3, d_emb=2"
    run(6, check)


def test_criterion_7_negative_gates():
    def check():
        with pytest.raises(HypothesisViolated) as exc:
            check_hypotheses(C0)
        w = exc.value.witness
        assert (str(w.tau), str(w.missing)) == ("12", "2")
        tri = NeuralCode(["12", "23", "13", "1", "2", "3"])
        with pytest.raises(HypothesisViolated) as exc:
            realize(tri)
        assert exc.value.witness == (0, 1, 2)
        triangle = GcGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
        for d_max in range(1, 4):
            for box in range(1, 5):
                assert brute_force_embed(triangle, d_max, box) is None
        return "pair code and triangle code rejected with witnesses; triangle has no drawing"
    run(7, check)


def test_criterion_8_determinism(tmp_path):
    def check():
        src = tmp_path / "c2.code"
        src.write_text("\n".join(" ".join(w) for w in "1234 12 2 124 234 134 34 4 345 5 45".split()) + "\n")
        runs = []
        for k in range(2):
            out = tmp_path / f"run{k}"
            assert main(["realize", str(src), "--out", str(out)]) == 0
            assert main(["verify", str(out / "complex.json"), "--seed", "7", "--report", str(out / "v.json")]) == 0
            runs.append({n: (out / n).read_bytes() for n in ["report.json", "family.json", "complex.json", "v.json"]})
        assert runs[0] == runs[1]
        json.loads(runs[0]["v.json"])
        return "realize and verify reports byte-identical across runs"
    run(8, check)
