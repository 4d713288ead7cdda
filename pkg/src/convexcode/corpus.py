"""Random strongly max intersection-complete codes with path or cycle graphs."""

from __future__ import annotations

import itertools
import random

from convexcode.code_core import CodeWord, NeuralCode, maximal_codewords


def random_graph(rng: random.Random, max_vertices: int = 5) -> tuple[int, list[tuple[int, int]]]:
    """A path forest, a single cycle, or a cycle with a pendant path."""
    kind = rng.choice(["paths", "paths", "cycle", "cycle+tail"])
    if kind == "paths" or max_vertices < 4:
        s = rng.randint(1, max_vertices)
        order = list(range(s))
        rng.shuffle(order)
        edges = []
        for a, b in zip(order, order[1:]):
            if rng.random() < 0.75:
                edges.append((min(a, b), max(a, b)))
        return s, edges
    length = rng.randint(4, max_vertices)
    edges = [(k, (k + 1) % length) for k in range(length)]
    s = length
    if kind == "cycle+tail" and s < max_vertices:
        extra = rng.randint(1, max_vertices - s)
        prev = rng.randrange(length)
        for v in range(s, s + extra):
            edges.append((prev, v))
            prev = v
        s += extra
    perm = list(range(s))
    rng.shuffle(perm)
    return s, [tuple(sorted((perm[a], perm[b]))) for a, b in edges]


def strong_closure(words: set[CodeWord]) -> set[CodeWord]:
    """Close a set of words under intersection with any set of its maximal words."""
    words = {w for w in words if w}
    while True:
        mt = maximal_codewords(NeuralCode(words))
        inters = []
        for size in range(1, mt.s + 1):
            for subset in itertools.combinations(mt.maximal, size):
                acc = subset[0]
                for m in subset[1:]:
                    acc = acc & m
                if acc:
                    inters.append(acc)
        new = {t & m for t in words for m in inters} - {CodeWord()}
        if new <= words:
            return words
        words |= new


def random_code(rng: random.Random, max_neurons: int = 12, max_vertices: int = 5) -> NeuralCode:
    """Build a code whose graph of maximal words is a chosen path forest or cycle graph.

    Every edge gets its own nonempty block of neurons as the meet of its two
    maximal words, vertices of degree below two get private neurons so no
    maximal word contains another, then random subwords are added and the
    result is closed under intersections with maximal words.
    """
    while True:
        s, edges = random_graph(rng, max_vertices)
        deg = [sum(v in e for e in edges) for v in range(s)]
        next_neuron = 1
        blocks: dict[object, list[int]] = {}
        for e in edges:
            size = rng.randint(1, 2)
            blocks[e] = list(range(next_neuron, next_neuron + size))
            next_neuron += size
        for v in range(s):
            low = 1 if deg[v] < 2 else 0
            size = rng.randint(low, 2)
            blocks[v] = list(range(next_neuron, next_neuron + size))
            next_neuron += size
        if next_neuron - 1 <= max_neurons:
            break
    maximal = []
    for v in range(s):
        neurons = list(blocks[v])
        for e in edges:
            if v in e:
                neurons += blocks[e]
        maximal.append(CodeWord.of(neurons))
    words = set(maximal)
    for mu in maximal:
        elems = list(mu)
        for _ in range(rng.randint(0, 4)):
            k = rng.randint(1, len(elems))
            words.add(CodeWord.of(rng.sample(elems, k)))
    return NeuralCode(strong_closure(words))


def corpus(size: int = 200, seed: int = 0, **kwargs) -> list[NeuralCode]:
    rng = random.Random(seed)
    return [random_code(rng, **kwargs) for _ in range(size)]
