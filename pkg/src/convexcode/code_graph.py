"""The maximal-codeword graph and its quasi-square-grid drawings."""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field

from convexcode.code_core import MeetTable


class NotAPathForest(ValueError):
    pass


class HypothesisViolated(ValueError):
    """A construction was asked to run on an input outside its hypotheses."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class SearchBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class GcGraph:
    """Vertex ``i`` stands for the ``i``-th maximal codeword."""

    vertex_count: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        for i, j in self.edges:
            if not (0 <= i < j < self.vertex_count):
                raise ValueError(f"bad edge {(i, j)} for {self.vertex_count} vertices")

    @classmethod
    def from_edges(cls, vertex_count: int, edges) -> GcGraph:
        return cls(vertex_count, frozenset((min(e), max(e)) for e in edges))

    def neighbors(self, v: int) -> list[int]:
        return sorted({j for i, j in self.edges if i == v} | {i for i, j in self.edges if j == v})

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in range(self.vertex_count)}
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj

    def degree(self, v: int) -> int:
        return sum(v in e for e in self.edges)

    def components(self) -> list[list[int]]:
        """Connected components, each sorted, ordered by smallest vertex."""
        adj = self.adjacency()
        seen: set[int] = set()
        comps = []
        for v in range(self.vertex_count):
            if v in seen:
                continue
            comp, stack = [], [v]
            seen.add(v)
            while stack:
                x = stack.pop()
                comp.append(x)
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            comps.append(sorted(comp))
        return comps


def build_gc(mt: MeetTable) -> GcGraph:
    return GcGraph(mt.s, frozenset(mt.meets))


@dataclass
class CycleReport:
    has_3_cycle: bool
    cycles: list[list[int]]
    pairwise_disjoint: bool
    D: int | None
    triangle: tuple[int, int, int] | None = None


def _triangle(g: GcGraph) -> tuple[int, int, int] | None:
    adj = g.adjacency()
    for i, j in sorted(g.edges):
        common = sorted(adj[i] & adj[j])
        if common:
            return tuple(sorted((i, j, common[0])))
    return None


def _is_bridge(adj: dict[int, set[int]], u: int, v: int) -> bool:
    seen, stack = {u}, [u]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if (x, y) in ((u, v), (v, u)) or y in seen:
                continue
            if y == v:
                return False
            seen.add(y)
            stack.append(y)
    return True


def _order_cycle(vertices: list[int], adj: dict[int, set[int]]) -> list[int]:
    """Walk a simple cycle from its smallest vertex toward the smaller neighbour."""
    members = set(vertices)
    start = min(members)
    order = [start]
    prev, cur = start, min(adj[start] & members)
    while cur != start:
        order.append(cur)
        nxt = [y for y in adj[cur] & members if y != prev]
        prev, cur = cur, nxt[0]
    return order


def analyze_cycles(g: GcGraph) -> CycleReport:
    """Find the cycles of ``g`` assuming they are vertex-disjoint.

    Degree-one vertices are stripped repeatedly, then bridges are removed;
    every remaining component must be a simple cycle for the cycles to be
    pairwise disjoint.
    """
    adj = g.adjacency()
    # strip trees hanging off the cyclic core
    core = {v: set(ns) for v, ns in adj.items()}
    leaves = deque(v for v, ns in core.items() if len(ns) <= 1)
    while leaves:
        v = leaves.popleft()
        if v not in core:
            continue
        for u in core.pop(v):
            core[u].discard(v)
            if len(core[u]) <= 1:
                leaves.append(u)
    # drop bridges left between cyclic blocks
    for u, v in sorted({(min(a, b), max(a, b)) for a in core for b in core[a]}):
        if _is_bridge(core, u, v):
            core[u].discard(v)
            core[v].discard(u)

    seen: set[int] = set()
    cycles: list[list[int]] = []
    disjoint = True
    for v in sorted(core):
        if v in seen or not core[v]:
            continue
        comp, stack = [], [v]
        seen.add(v)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in core[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if all(len(core[x]) == 2 for x in comp):
            cycles.append(_order_cycle(comp, core))
        else:
            disjoint = False
    cycles.sort()

    tri = _triangle(g)
    D = None
    if disjoint and tri is None:
        on_cycle = sum(len(c) for c in cycles)
        D = 2 + g.vertex_count + len(cycles) - on_cycle
    return CycleReport(tri is not None, cycles, disjoint, D, tri)


def is_path_forest(g: GcGraph) -> bool:
    if any(g.degree(v) > 2 for v in range(g.vertex_count)):
        return False
    return all(
        sum(1 for i, j in g.edges if i in comp_set) == len(comp) - 1
        for comp in g.components()
        for comp_set in [set(comp)]
    )


@dataclass
class GridEmbedding:
    d: int
    coords: dict[int, tuple[int, ...]]

    def to_json(self) -> dict:
        return {"d": self.d, "coords": {str(v): list(p) for v, p in sorted(self.coords.items())}}

    @classmethod
    def from_json(cls, data: dict) -> GridEmbedding:
        coords = {int(v): tuple(int(c) for c in p) for v, p in data["coords"].items()}
        return cls(int(data["d"]), coords)

    @classmethod
    def load(cls, path) -> GridEmbedding:
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class Violation:
    kind: str
    vertices: tuple[int, ...]
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.kind} at {self.vertices}" + (f": {self.detail}" if self.detail else "")


@dataclass
class _Edge:
    ends: tuple[int, int]
    axis: int
    lo: int
    hi: int
    base: tuple[int, ...] = field(repr=False)


def _edge_geometry(p: tuple[int, ...], q: tuple[int, ...], ends) -> _Edge | None:
    diff = [k for k in range(len(p)) if p[k] != q[k]]
    if len(diff) != 1:
        return None
    a = diff[0]
    return _Edge(ends, a, min(p[a], q[a]), max(p[a], q[a]), p)


def validate_embedding(g: GcGraph, emb: GridEmbedding, vertices=None) -> list[Violation]:
    """Check a drawing against the quasi-square-grid rules.

    Besides the axis-aligned and no-intermediate-vertex conditions this also
    rejects edges that cross at interior points and components closer than
    sup-distance 2, since either would make the tube construction ambiguous.
    ``vertices`` restricts the check to an induced subgraph.
    """
    vs = sorted(range(g.vertex_count) if vertices is None else vertices)
    vset = set(vs)
    out: list[Violation] = []
    missing = [v for v in vs if v not in emb.coords]
    if missing:
        return [Violation("missing coordinates", tuple(missing))]
    for v in vs:
        if len(emb.coords[v]) != emb.d:
            out.append(Violation("wrong dimension", (v,), f"expected {emb.d} coordinates"))
    if out:
        return out

    at: dict[tuple[int, ...], int] = {}
    for v in vs:
        p = emb.coords[v]
        if p in at:
            out.append(Violation("duplicate coordinates", (at[p], v), str(p)))
        else:
            at[p] = v

    geoms: list[_Edge] = []
    for i, j in sorted(g.edges):
        if i not in vset or j not in vset:
            continue
        e = _edge_geometry(emb.coords[i], emb.coords[j], (i, j))
        if e is None:
            n_diff = sum(a != b for a, b in zip(emb.coords[i], emb.coords[j]))
            out.append(Violation("not axis-aligned", (i, j), f"differs in {n_diff} coordinates"))
            continue
        geoms.append(e)
        for z in vs:
            if z in (i, j):
                continue
            pz = emb.coords[z]
            if all(pz[k] == e.base[k] for k in range(emb.d) if k != e.axis) and e.lo < pz[e.axis] < e.hi:
                out.append(Violation("intermediate vertex on edge", (i, j, z)))

    for e, f in itertools.combinations(geoms, 2):
        if e.axis == f.axis or set(e.ends) & set(f.ends):
            continue
        others = [k for k in range(emb.d) if k not in (e.axis, f.axis)]
        if any(e.base[k] != f.base[k] for k in others):
            continue
        if e.lo < f.base[e.axis] < e.hi and f.lo < e.base[f.axis] < f.hi:
            out.append(Violation("edges cross", e.ends + f.ends))

    comp_of = {}
    for c, comp in enumerate(g.components()):
        for v in comp:
            comp_of[v] = c
    for u, v in itertools.combinations(vs, 2):
        if comp_of[u] != comp_of[v]:
            dist = max((abs(a - b) for a, b in zip(emb.coords[u], emb.coords[v])), default=0)
            if dist < 2:
                out.append(Violation("components too close", (u, v), f"sup-distance {dist}"))
    return out


def _pad(coords: dict[int, dict[int, int]], d: int) -> dict[int, tuple[int, ...]]:
    return {v: tuple(c.get(k, 0) for k in range(d)) for v, c in coords.items()}


def _combine(g: GcGraph, parts: list[dict[int, tuple[int, ...]]]) -> GridEmbedding:
    """Normalise each component to start at the origin and lay them apart along axis 0."""
    d = max((len(next(iter(p.values()))) for p in parts if p), default=0)
    if len(parts) > 1:
        d = max(d, 1)
    coords: dict[int, tuple[int, ...]] = {}
    offset = 0
    for part in parts:
        padded = {v: p + (0,) * (d - len(p)) for v, p in part.items()}
        mins = [min(p[k] for p in padded.values()) for k in range(d)]
        for v, p in padded.items():
            q = [p[k] - mins[k] for k in range(d)]
            if d:
                q[0] += offset
            coords[v] = tuple(q)
        if d:
            offset = max(coords[v][0] for v in padded) + 2
    return GridEmbedding(d, dict(sorted(coords.items())))


def embed_path_forest(g: GcGraph) -> GridEmbedding:
    """Lay every path component out on consecutive integers of one axis."""
    if not is_path_forest(g):
        bad = [v for v in range(g.vertex_count) if g.degree(v) > 2]
        raise NotAPathForest(f"not a union of paths (high-degree vertices {bad})" if bad else "graph has a cycle")
    if g.vertex_count <= 1:
        return GridEmbedding(0, {v: () for v in range(g.vertex_count)})
    adj = g.adjacency()
    parts = []
    for comp in g.components():
        start = min(v for v in comp if len(adj[v]) <= 1)
        part = {start: (0,)}
        prev, cur = None, start
        while True:
            nxt = [y for y in adj[cur] if y != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            part[cur] = (len(part),)
        parts.append(part)
    return _combine(g, parts)


def embed_disjoint_cycles(g: GcGraph, report: CycleReport | None = None) -> GridEmbedding:
    """Grid drawing for graphs whose cycles are vertex-disjoint and of length at least 4.

    Each component is grown from its smallest vertex. A vertex off the
    current cycle is attached one step along a new axis; a cycle of length
    ``l + 2`` is drawn as a rectangle whose bottom row runs ``l - 1`` steps
    along one axis and whose two top corners sit one step along another,
    joined by a single long top edge. Already-open axes are reused whenever
    the result still validates, otherwise a fresh axis is opened.
    """
    report = report or analyze_cycles(g)
    if report.has_3_cycle:
        raise HypothesisViolated(f"3-cycle {report.triangle}", report.triangle)
    if not report.pairwise_disjoint:
        raise HypothesisViolated("graph has cycles sharing a vertex")
    if g.vertex_count <= 1:
        return GridEmbedding(0, {v: () for v in range(g.vertex_count)})

    cycle_of: dict[int, list[int]] = {v: c for c in report.cycles for v in c}
    adj = g.adjacency()
    parts = []
    for comp in g.components():
        coords: dict[int, dict[int, int]] = {}
        naxes = 0

        def fits(new: list[int], pos: dict[int, dict[int, int]], d: int) -> bool:
            trial = dict(coords)
            trial.update(pos)
            emb = GridEmbedding(d, _pad(trial, d))
            return not validate_embedding(g, emb, vertices=trial)

        def shifted(p: dict[int, int], axis: int, delta: int) -> dict[int, int]:
            q = dict(p)
            q[axis] = q.get(axis, 0) + delta
            return q

        def place_single(parent: int, w: int) -> None:
            nonlocal naxes
            p = coords[parent]
            for axis in range(naxes):
                for sign in (1, -1):
                    pos = {w: shifted(p, axis, sign)}
                    if fits([w], pos, naxes):
                        coords.update(pos)
                        return
            coords[w] = shifted(p, naxes, 1)
            naxes += 1

        def place_cycle(v: int) -> None:
            nonlocal naxes
            cyc = cycle_of[v]
            k = cyc.index(v)
            ring = cyc[k:] + cyc[:k]
            if adj[v] and ring[-1] < ring[1]:
                ring = [ring[0]] + ring[1:][::-1]
            ell = len(ring) - 2
            p = coords[v]

            def layout(bottom, top):
                (ba, bs), (ta, ts) = bottom, top
                pos = {}
                for i in range(ell - 1):
                    pos[ring[1 + i]] = shifted(p, ba, bs * (1 + i))
                pos[ring[ell]] = shifted(shifted(p, ba, bs * (ell - 1)), ta, ts)
                pos[ring[ell + 1]] = shifted(p, ta, ts)
                return pos

            existing = [(a, s) for a in range(naxes) for s in (1, -1)]
            fresh_b, fresh_t = (naxes, 1), (naxes + 1, 1)
            options = [(b, t, 0) for b in existing for t in existing if b[0] != t[0]]
            options += [(b, (naxes, 1), 1) for b in existing]
            options += [((naxes, 1), t, 1) for t in existing]
            for b, t, extra in options:
                pos = layout(b, t)
                if fits(list(pos), pos, naxes + extra):
                    coords.update(pos)
                    naxes += extra
                    return
            coords.update(layout(fresh_b, fresh_t))
            naxes += 2

        root = comp[0]
        coords[root] = {}
        if root in cycle_of:
            place_cycle(root)
        queue = deque(sorted(coords))
        done = set(queue)
        while queue:
            v = queue.popleft()
            for w in sorted(adj[v]):
                if w in coords:
                    if w not in done:
                        done.add(w)
                        queue.append(w)
                    continue
                place_single(v, w)
                if w in cycle_of:
                    place_cycle(w)
                for x in sorted(coords):
                    if x not in done:
                        done.add(x)
                        queue.append(x)
        parts.append(_pad(coords, naxes))
    emb = _combine(g, parts)
    problems = validate_embedding(g, emb)
    if problems:
        raise AssertionError(f"constructed drawing is invalid: {problems[0]}")
    return emb


def brute_force_embed(
    g: GcGraph,
    d_max: int,
    box: int,
    *,
    max_vertices: int = 8,
    budget: int = 2_000_000,
) -> GridEmbedding | None:
    """Exhaustive search for a drawing inside ``[0, box]^d`` with the least ``d <= d_max``.

    Vertices are placed in index order and candidate points tried in
    lexicographic order, so the first drawing found is the lexicographically
    least one for its dimension.
    """
    if g.vertex_count > max_vertices:
        raise ValueError(f"{g.vertex_count} vertices exceeds the search limit of {max_vertices}")
    if g.vertex_count <= 1:
        return GridEmbedding(0, {v: () for v in range(g.vertex_count)})
    adj = g.adjacency()
    steps = 0
    for d in range(1, d_max + 1):
        points = list(itertools.product(range(box + 1), repeat=d))
        coords: dict[int, tuple[int, ...]] = {}

        def search(v: int) -> bool:
            nonlocal steps
            if v == g.vertex_count:
                return True
            taken = set(coords.values())
            for p in points:
                steps += 1
                if steps > budget:
                    raise SearchBudgetExceeded(f"more than {budget} candidate placements tried")
                if p in taken:
                    continue
                if any(sum(a != b for a, b in zip(p, coords[u])) != 1 for u in adj[v] if u in coords):
                    continue
                coords[v] = p
                if not validate_embedding(g, GridEmbedding(d, coords), vertices=list(coords)):
                    if search(v + 1):
                        return True
                del coords[v]
            return False

        if search(0):
            return GridEmbedding(d, dict(coords))
    return None


def best_embedding(g: GcGraph, report: CycleReport | None = None) -> GridEmbedding | None:
    """Lowest-dimensional drawing among the constructors and a small exhaustive search."""
    report = report or analyze_cycles(g)
    found: list[GridEmbedding] = []
    if is_path_forest(g):
        found.append(embed_path_forest(g))
    if report.D is not None:
        found.append(embed_disjoint_cycles(g, report))
    best = min(found, key=lambda e: e.d, default=None)
    floor = 0 if g.vertex_count <= 1 else 1
    if (best is None or best.d > floor) and g.vertex_count <= 6 and not report.has_3_cycle:
        d_max = 3 if best is None else best.d - 1
        try:
            hit = brute_force_embed(g, d_max, box=g.vertex_count, budget=200_000)
        except SearchBudgetExceeded:
            hit = None
        if hit is not None and (best is None or hit.d < best.d):
            best = hit
    return best
