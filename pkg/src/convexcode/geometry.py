"""The tube complex over a grid drawing, point location and geometric verification.

A point of ``R^(d+2)`` is split as ``(u, x)`` with ``u`` in the plane of the
circles and ``x`` in the lattice space of the drawing. Over each ``x`` near
the drawing sits a disk of radius 1/3 cut by an inscribed regular polygon
into an interior region and segments, labeled as in the circle family.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from convexcode.code_core import EMPTY, CodeWord, NeuralCode, canonical
from convexcode.code_graph import GcGraph, GridEmbedding, validate_embedding
from convexcode.realization import CircleFamily, Fiber, fiber_name

RADIUS = 1 / 3
HALFWIDTH = 1 / 3
EPS = 1e-9

INTERIOR = "interior"
SEGMENT = "segment"
BLANK = "blank"
OUTSIDE = "outside"


class MismatchedTopology(ValueError):
    pass


@dataclass(frozen=True)
class RegionRef:
    fiber: Fiber | None
    kind: str
    index: int | None
    label: CodeWord

    def __str__(self) -> str:
        if self.kind == OUTSIDE:
            return "outside"
        where = fiber_name(self.fiber)
        part = self.kind if self.index is None else f"{self.kind} {self.index}"
        return f"{where} {part}: {self.label}"


@dataclass
class TubeComplex:
    emb: GridEmbedding
    fam: CircleFamily
    code: NeuralCode
    r_geom: int = field(init=False)
    disk_radius: float = RADIUS
    tube_halfwidth: float = HALFWIDTH

    def __post_init__(self) -> None:
        self.r_geom = max(self.fam.r, 3)
        d = self.emb.d
        self.fibers: list[Fiber] = self.fam.fibers()
        self._index = {f: k for k, f in enumerate(self.fibers)}
        self._vertices = sorted(self.emb.coords)
        self._vpos = np.array([self.emb.coords[v] for v in self._vertices], dtype=float).reshape(
            len(self._vertices), d)
        self._edges = []
        for f in self.fam.edge_fibers():
            i, j = f
            p, q = self.emb.coords[i], self.emb.coords[j]
            axis = next(k for k in range(d) if p[k] != q[k])
            self._edges.append((f, axis, min(p[axis], q[axis]), max(p[axis], q[axis]), np.array(p, float)))

        n = self.code.n
        width = max([n] + [w.width for c in self.fam.circles.values() for w in c.labels()])
        self.n = width
        r = self.r_geom
        self._words: list[list[CodeWord]] = []
        table = np.zeros((len(self.fibers) + 1, r + 1, width), dtype=bool)
        for k, f in enumerate(self.fibers):
            circle = self.fam.circles[f]
            row = [circle.interior] + [
                (circle.segments[t] if t < self.fam.r and circle.segments[t] is not None else EMPTY)
                for t in range(r)
            ]
            self._words.append(row)
            for region, w in enumerate(row):
                for neuron in w:
                    table[k, region, neuron - 1] = True
        self._words.append([EMPTY] * (r + 1))
        # last row stands for the outside
        self._table = table
        self._step = 2 * math.pi / r
        self._apothem = RADIUS * math.cos(math.pi / r)

    @property
    def dim(self) -> int:
        return self.emb.d + 2

    def fiber_center(self, f: Fiber) -> np.ndarray:
        if len(f) == 1:
            return np.array(self.emb.coords[f[0]], float)
        return (np.array(self.emb.coords[f[0]], float) + np.array(self.emb.coords[f[1]], float)) / 2

    def fiber_box(self, f: Fiber) -> tuple[np.ndarray, np.ndarray]:
        """Bounds of the lattice-space part of a fiber's piece of the tube."""
        if len(f) == 1:
            c = self.fiber_center(f)
            return c - HALFWIDTH, c + HALFWIDTH
        p, q = (np.array(self.emb.coords[v], float) for v in f)
        lo, hi = np.minimum(p, q) - HALFWIDTH, np.maximum(p, q) + HALFWIDTH
        return lo, hi

    def bounding_box(self, fibers=None) -> tuple[np.ndarray, np.ndarray]:
        fibers = self.fibers if fibers is None else fibers
        d = self.emb.d
        if not fibers:
            lo, hi = np.zeros(d), np.zeros(d)
        else:
            boxes = [self.fiber_box(f) for f in fibers]
            lo = np.min([b[0] for b in boxes], axis=0)
            hi = np.max([b[1] for b in boxes], axis=0)
        return np.concatenate([[-RADIUS, -RADIUS], lo]), np.concatenate([[RADIUS, RADIUS], hi])

    def locate_many(self, points) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Vectorised point location.

        Returns ``(fiber, region, margin)``: fiber index into ``self.fibers``
        (``len(self.fibers)`` for the outside), region 0 for the polygon
        interior or ``1 + t`` for segment ``t`` (``-1`` outside), and a lower
        bound on the distance to the nearest region boundary.
        """
        Y = np.asarray(points, dtype=float).reshape(-1, self.dim)
        N = len(Y)
        u, x = Y[:, :2], Y[:, 2:]
        outside_idx = len(self.fibers)
        fiber = np.full(N, -1)
        xmargin = np.full(N, np.inf)
        xout = np.full(N, np.inf)

        for vi, v in enumerate(self._vertices):
            dist = np.abs(x - self._vpos[vi]).max(axis=1) if self.emb.d else np.zeros(N)
            hit = (dist <= HALFWIDTH) & (fiber < 0)
            fiber[hit] = self._index[(v,)]
            xmargin[hit] = HALFWIDTH - dist[hit]
            np.minimum(xout, dist - HALFWIDTH, out=xout)
        for f, axis, lo, hi, base in self._edges:
            along = x[:, axis]
            rest = np.abs(np.delete(x - base, axis, axis=1))
            perp = rest.max(axis=1) if rest.shape[1] else np.zeros(N)
            gap = np.maximum(np.maximum(lo - along, along - hi), 0.0)
            np.minimum(xout, np.maximum(gap, perp) - HALFWIDTH, out=xout)
            hit = (fiber < 0) & (perp <= HALFWIDTH) & (along > lo + HALFWIDTH) & (along < hi - HALFWIDTH)
            fiber[hit] = self._index[f]
            xmargin[hit] = np.minimum(
                HALFWIDTH - perp[hit],
                np.minimum(along[hit] - (lo + HALFWIDTH), (hi - HALFWIDTH) - along[hit]),
            )

        rho = np.hypot(u[:, 0], u[:, 1])
        theta = np.mod(np.arctan2(u[:, 1], u[:, 0]), 2 * math.pi)
        t = np.minimum((theta / self._step).astype(int), self.r_geom - 1)
        phi = (t + 0.5) * self._step
        proj = u[:, 0] * np.cos(phi) + u[:, 1] * np.sin(phi)
        in_poly = proj <= self._apothem
        region = np.where(in_poly, 0, t + 1)
        umargin = np.where(in_poly, self._apothem - proj, np.minimum(proj - self._apothem, RADIUS - rho))

        in_disk = rho < RADIUS
        inside = (fiber >= 0) & in_disk
        margin = np.where(inside, np.minimum(xmargin, umargin), 0.0)
        x_only = (fiber < 0) & in_disk
        u_only = (fiber >= 0) & ~in_disk
        both = (fiber < 0) & ~in_disk
        margin[x_only] = xout[x_only]
        margin[u_only] = rho[u_only] - RADIUS
        margin[both] = np.maximum(xout[both], rho[both] - RADIUS)

        fiber = np.where(inside, fiber, outside_idx)
        region = np.where(inside, region, -1)
        return fiber, region, margin

    def labels_at(self, fiber: np.ndarray, region: np.ndarray) -> np.ndarray:
        """Boolean membership matrix, one row per point and one column per neuron."""
        return self._table[fiber, np.maximum(region, 0)]

    def word(self, fiber: int, region: int) -> CodeWord:
        if region < 0:
            return EMPTY
        return self._words[fiber][region]

    def locate(self, point) -> RegionRef:
        fiber, region, _ = self.locate_many([point])
        f, reg = int(fiber[0]), int(region[0])
        if reg < 0:
            return RegionRef(None, OUTSIDE, None, EMPTY)
        label = self.word(f, reg)
        if reg == 0:
            return RegionRef(self.fibers[f], INTERIOR, None, label)
        t = reg - 1
        kind = SEGMENT if label else BLANK
        return RegionRef(self.fibers[f], kind, t, label)

    def segment_centroid(self, t: int) -> np.ndarray:
        """Centroid of segment ``t`` (between polygon vertices ``t`` and ``t + 1``)."""
        alpha = self._step
        dist = 4 * RADIUS * math.sin(alpha / 2) ** 3 / (3 * (alpha - math.sin(alpha)))
        phi = (t + 0.5) * alpha
        return np.array([math.cos(phi), math.sin(phi)]) * dist

    def witness_points(self) -> list[tuple[Fiber, int, np.ndarray]]:
        """One interior point for every labeled region, as ``(fiber, region, point)``."""
        out = []
        for f in self.fibers:
            x = self.fiber_center(f)
            out.append((f, 0, np.concatenate([[0.0, 0.0], x])))
            circle = self.fam.circles[f]
            for t, w in enumerate(circle.segments):
                if w is None:
                    continue
                c = self.segment_centroid(t)
                c = c * (1 - EPS / np.linalg.norm(c))
                out.append((f, t + 1, np.concatenate([c, x])))
        return out

    def to_json(self) -> dict:
        return {
            "embedding": self.emb.to_json(),
            "family": self.fam.to_json(),
            "code": {"n": self.code.n, "words": [w.to_list() for w in self.code]},
            "r_geom": self.r_geom,
            "disk_radius": "1/3",
            "tube_halfwidth": "1/3",
        }

    @classmethod
    def from_json(cls, data: dict) -> TubeComplex:
        emb = GridEmbedding.from_json(data["embedding"])
        fam = CircleFamily.from_json(data["family"])
        code = NeuralCode([CodeWord.of(w) for w in data["code"]["words"]], n=data["code"]["n"])
        tc = assemble(emb, fam, code)
        if int(data.get("r_geom", tc.r_geom)) != tc.r_geom:
            raise ValueError(f"r_geom {data['r_geom']} disagrees with family r={fam.r}")
        return tc


def assemble(emb: GridEmbedding, fam: CircleFamily, code: NeuralCode | None = None) -> TubeComplex:
    """Attach the circle family to a grid drawing of its graph."""
    vertex_set = {f[0] for f in fam.vertex_fibers()}
    if set(emb.coords) != vertex_set:
        raise MismatchedTopology(
            f"drawing has vertices {sorted(emb.coords)} but family has circles for {sorted(vertex_set)}")
    edges = set(fam.edge_fibers())
    g = GcGraph.from_edges(len(vertex_set), edges) if vertex_set == set(range(len(vertex_set))) else None
    if g is None:
        raise MismatchedTopology("vertex circles must be numbered 0..s-1")
    problems = validate_embedding(g, emb)
    if problems:
        raise MismatchedTopology(f"drawing is not a valid grid for the family's edges: {problems[0]}")
    if code is None:
        code = NeuralCode(w for c in fam.circles.values() for w in c.labels())
    return TubeComplex(emb, fam, code)


@dataclass
class VerificationReport:
    recovered_code: set[CodeWord] = field(default_factory=set)
    missing: list[CodeWord] = field(default_factory=list)
    extra: list[CodeWord] = field(default_factory=list)
    convexity_violations: list[dict] = field(default_factory=list)
    samples_used: int = 0
    pairs_tested: int = 0

    @property
    def passed(self) -> bool:
        return not self.missing and not self.extra and not self.convexity_violations

    def merge(self, other: VerificationReport) -> VerificationReport:
        return VerificationReport(
            self.recovered_code | other.recovered_code,
            self.missing + other.missing,
            self.extra + other.extra,
            self.convexity_violations + other.convexity_violations,
            self.samples_used + other.samples_used,
            self.pairs_tested + other.pairs_tested,
        )

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "recovered_code": [str(w) for w in canonical(self.recovered_code)],
            "missing": [str(w) for w in self.missing],
            "extra": [str(w) for w in self.extra],
            "convexity_violations": self.convexity_violations,
            "samples_used": self.samples_used,
            "pairs_tested": self.pairs_tested,
        }


def _uniform(rng: np.random.Generator, lo: np.ndarray, hi: np.ndarray, count: int) -> np.ndarray:
    return lo + (hi - lo) * rng.random((count, len(lo)))


def sample_code(tc: TubeComplex, n_random: int = 10_000, seed: int = 0) -> VerificationReport:
    """Recover the code of the realization from region witnesses plus uniform samples."""
    if n_random < 1:
        raise ValueError("n_random must be positive")
    rng = np.random.default_rng(seed)
    wit = tc.witness_points()
    pts = [p for _, _, p in wit]
    lo, hi = tc.bounding_box()
    # one point off the disk so the empty word is always witnessed
    pts.append(np.concatenate([[RADIUS * 1.2, 0.0], (lo[2:] + hi[2:]) / 2]))
    pts = np.array(pts).reshape(-1, tc.dim)
    rand = _uniform(rng, lo, hi, n_random)
    fiber, region, _ = tc.locate_many(np.vstack([pts, rand]))
    recovered = {tc.word(int(f), int(r)) for f, r in set(zip(fiber.tolist(), region.tolist()))}
    target = set(tc.code.words) | {EMPTY}
    return VerificationReport(
        recovered_code=recovered,
        missing=canonical(target - recovered),
        extra=canonical(recovered - target),
        samples_used=len(pts) + n_random,
    )


def _region_witnesses(tc: TubeComplex, neuron: int) -> list[np.ndarray]:
    return [p for f, reg, p in tc.witness_points() if neuron in tc.word(tc._index[f], reg)]


def convexity_check(
    tc: TubeComplex,
    pairs_per_neuron: int = 2000,
    seed: int = 0,
    max_report: int = 20,
) -> VerificationReport:
    """Midpoint test of each realized set.

    For each neuron, point pairs are drawn by rejection sampling inside the
    set and their midpoints located; a midpoint outside the set by more than
    ``EPS`` is a violation. Witness points of the regions containing the
    neuron are also paired with each other deterministically.
    """
    rng = np.random.default_rng(seed)
    report = VerificationReport()
    for neuron in range(1, tc.n + 1):
        col = neuron - 1
        fibers = [f for k, f in enumerate(tc.fibers) if tc._table[k, :, col].any()]
        if not fibers:
            continue
        lo, hi = tc.bounding_box(fibers)
        need = 2 * pairs_per_neuron
        chosen: list[np.ndarray] = []
        got = 0
        attempts = 0
        while got < need and attempts < 50:
            batch = _uniform(rng, lo, hi, max(2 * (need - got), 64))
            f, reg, _ = tc.locate_many(batch)
            keep = batch[tc.labels_at(f, reg)[:, col]]
            chosen.append(keep)
            got += len(keep)
            attempts += 1
        sample = np.vstack(chosen)[:need] if chosen else np.empty((0, tc.dim))
        pairs_a, pairs_b = sample[0::2], sample[1::2]
        m = min(len(pairs_a), len(pairs_b))
        pairs_a, pairs_b = pairs_a[:m], pairs_b[:m]

        wit = _region_witnesses(tc, neuron)
        if wit:
            first, last, mid = wit[0], wit[-1], wit[len(wit) // 2]
            det_a = [first, first, mid] + [first] * len(wit) + [last] * len(wit)
            det_b = [last, mid, last] + wit + wit
            pairs_a = np.vstack([pairs_a, np.array(det_a)])
            pairs_b = np.vstack([pairs_b, np.array(det_b)])

        mids = (pairs_a + pairs_b) / 2
        f, reg, margin = tc.locate_many(mids)
        has = tc.labels_at(f, reg)[:, col]
        bad = np.flatnonzero(~has & (margin > EPS))
        report.pairs_tested += len(mids)
        report.samples_used += len(mids) + 2 * m
        for k in bad[: max(0, max_report - len(report.convexity_violations))]:
            report.convexity_violations.append({
                "neuron": neuron,
                "p": pairs_a[k].tolist(),
                "q": pairs_b[k].tolist(),
                "midpoint": mids[k].tolist(),
                "located": str(tc.word(int(f[k]), int(reg[k]))),
            })
        if len(bad) > 0 and len(report.convexity_violations) >= max_report:
            report.convexity_violations.append({"neuron": neuron, "truncated": int(len(bad))})
    return report


def verify(tc: TubeComplex, samples: int = 10_000, pairs: int = 2000, seed: int = 0) -> VerificationReport:
    return sample_code(tc, samples, seed).merge(convexity_check(tc, pairs, seed + 1))


def export_json(tc: TubeComplex, path) -> None:
    Path(path).write_text(json.dumps(tc.to_json(), indent=1) + "\n")


def load_complex(path) -> TubeComplex:
    return TubeComplex.from_json(json.loads(Path(path).read_text()))


def cross_section_svg(tc: TubeComplex, fiber: Fiber) -> str:
    """SVG drawing of one circle with its inscribed polygon and region labels."""
    circle = tc.fam.circles[fiber]
    r = tc.r_geom
    pts = [(RADIUS * math.cos(2 * math.pi * t / r), -RADIUS * math.sin(2 * math.pi * t / r)) for t in range(r)]
    font = min(0.04, 0.6 / r + 0.015)
    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="-0.4 -0.4 0.8 0.8" width="400" height="400">',
        f'<title>{fiber_name(fiber)}</title>',
        f'<circle cx="0" cy="0" r="{RADIUS:.6f}" fill="none" stroke="black" stroke-width="0.003"/>',
        '<polygon points="' + " ".join(f"{x:.6f},{y:.6f}" for x, y in pts)
        + '" fill="none" stroke="black" stroke-width="0.002"/>',
        f'<text x="0" y="0" font-size="{font * 1.3:.4f}" text-anchor="middle" '
        f'dominant-baseline="middle">{circle.interior}</text>',
    ]
    for t in range(min(r, tc.fam.r)):
        w = circle.segments[t]
        if w is None:
            continue
        pos = tc.segment_centroid(t)
        out.append(
            f'<text x="{pos[0]:.5f}" y="{-pos[1]:.5f}" font-size="{font:.4f}" text-anchor="middle" '
            f'dominant-baseline="middle" data-segment="{t}">{w}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def export_svg_cross_section(tc: TubeComplex, fiber: Fiber, path) -> None:
    Path(path).write_text(cross_section_svg(tc, fiber))
