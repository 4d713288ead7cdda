"""Labeled circle families: segment groups, the labeling steps and the alignment fixpoint."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field

from convexcode.code_core import (
    EMPTY,
    CodeWord,
    Constants,
    MeetTable,
    NeuralCode,
    canonical,
    compute_constants,
    is_strongly_mic,
    maximal_codewords,
    restrict,
)
from convexcode.code_graph import HypothesisViolated, analyze_cycles, build_gc


class CapacityExceeded(RuntimeError):
    pass


class PropagationConflict(RuntimeError):
    """Two different labels were proposed for one blank segment."""

    def __init__(self, fiber, index: int, sources: list[tuple[object, CodeWord]]):
        self.fiber = fiber
        self.index = index
        self.sources = sources
        desc = ", ".join(f"{fiber_name(src)} -> {w}" for src, w in sources)
        super().__init__(f"segment {index} of {fiber_name(fiber)} has conflicting candidates: {desc}")


# Fiber ids: (i,) for the circle of the i-th maximal word, (i, j) for the meet circle.
Fiber = tuple


def fiber_name(fiber: Fiber) -> str:
    return "S" + ",".join(str(k + 1) for k in fiber)


def parse_fiber(name: str) -> Fiber:
    if not name.startswith("S"):
        raise ValueError(f"bad fiber name {name!r}")
    return tuple(int(k) - 1 for k in name[1:].split(","))


UNLABELED = "unlabeled"
PRIME = "prime"
PLAIN = "plain"


@dataclass(frozen=True)
class Span:
    kind: str
    edge: tuple[int, int] | None
    start: int
    stop: int

    def __len__(self) -> int:
        return self.stop - self.start

    @property
    def indices(self) -> range:
        return range(self.start, self.stop)

    def name(self) -> str:
        if self.edge is None:
            return self.kind
        i, j = self.edge
        return f"{self.kind}({i + 1},{j + 1})"


@dataclass(frozen=True)
class GroupLayout:
    r: int
    spans: tuple[Span, ...]
    run: int = 1  # segments per proper subword of a meet, 2^k2 - 1

    def span(self, kind: str, edge=None) -> Span:
        for sp in self.spans:
            if sp.kind == kind and sp.edge == edge:
                return sp
        raise KeyError((kind, edge))

    def group_of(self, t: int) -> Span:
        for sp in self.spans:
            if sp.start <= t < sp.stop:
                return sp
        raise IndexError(t)


def plan_groups(k: Constants, mt: MeetTable) -> GroupLayout:
    """Unlabeled group first, then a primed and a plain group per meet in edge order."""
    spans = []
    pos = 0

    def add(kind, edge, length):
        nonlocal pos
        spans.append(Span(kind, edge, pos, pos + length))
        pos += length

    add(UNLABELED, None, 2**k.k1 - 1)
    for edge in mt.edges():
        add(PRIME, edge, 2**k.k2 - 2)
        add(PLAIN, edge, (2**k.k2 - 1) * k.sigma_size)
    if pos != k.r:
        raise AssertionError(f"groups cover {pos} segments, expected r={k.r}")
    return GroupLayout(k.r, tuple(spans), max(2**k.k2 - 1, 1))


@dataclass
class CircleLabeling:
    fiber: Fiber
    interior: CodeWord
    segments: list[CodeWord | None]

    def labels(self) -> list[CodeWord]:
        return [self.interior] + [w for w in self.segments if w is not None]


@dataclass
class CircleFamily:
    layout: GroupLayout
    circles: dict[Fiber, CircleLabeling] = field(default_factory=dict)

    @property
    def r(self) -> int:
        return self.layout.r

    def __getitem__(self, fiber: Fiber) -> CircleLabeling:
        return self.circles[fiber]

    def vertex_fibers(self) -> list[Fiber]:
        return sorted(f for f in self.circles if len(f) == 1)

    def edge_fibers(self) -> list[Fiber]:
        return sorted(f for f in self.circles if len(f) == 2)

    def fibers(self) -> list[Fiber]:
        return self.vertex_fibers() + self.edge_fibers()

    def snapshot(self) -> dict[Fiber, list[CodeWord | None]]:
        return {f: list(c.segments) for f, c in self.circles.items()}

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "run": self.layout.run,
            "layout": [
                {"group": sp.kind, "edge": None if sp.edge is None else [sp.edge[0] + 1, sp.edge[1] + 1],
                 "start": sp.start, "stop": sp.stop}
                for sp in self.layout.spans
            ],
            "circles": [
                {
                    "fiber": fiber_name(f),
                    "interior": self.circles[f].interior.to_list(),
                    "segments": [None if w is None else w.to_list() for w in self.circles[f].segments],
                }
                for f in self.fibers()
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> CircleFamily:
        spans = tuple(
            Span(g["group"], None if g["edge"] is None else (g["edge"][0] - 1, g["edge"][1] - 1),
                 g["start"], g["stop"])
            for g in data["layout"]
        )
        fam = cls(GroupLayout(int(data["r"]), spans, int(data.get("run", 1))))
        for c in data["circles"]:
            f = parse_fiber(c["fiber"])
            segs = [None if w is None else CodeWord.of(w) for w in c["segments"]]
            if len(segs) != fam.r:
                raise ValueError(f"{c['fiber']} has {len(segs)} segments, expected {fam.r}")
            fam.circles[f] = CircleLabeling(f, CodeWord.of(c["interior"]), segs)
        return fam

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


def check_hypotheses(code: NeuralCode, mt: MeetTable | None = None) -> None:
    """Raise HypothesisViolated unless the code is strongly max intersection-complete with no 3-cycle."""
    mt = mt or maximal_codewords(code)
    ok, witness = is_strongly_mic(code, mt)
    if not ok:
        subset = "".join(str(mt.maximal[k]) + "," for k in witness.subset).rstrip(",")
        raise HypothesisViolated(
            f"not strongly max intersection-complete: {witness.tau} & ({subset}) = {witness.missing} is missing",
            witness,
        )
    report = analyze_cycles(build_gc(mt))
    if report.has_3_cycle:
        names = "-".join(str(mt.maximal[k]) for k in report.triangle)
        raise HypothesisViolated(f"G_C has a 3-cycle {names}", report.triangle)


def _blanks(circle: CircleLabeling, span: Span) -> list[int]:
    return [t for t in span.indices if circle.segments[t] is None]


def build_circles(
    code: NeuralCode,
    mt: MeetTable,
    layout: GroupLayout,
    trace: list | None = None,
) -> CircleFamily:
    """Create the circles and run the labeling steps up to (not including) propagation.

    Codewords are processed in canonical order. Steps 6 to 8 take the
    lowest-index blank segments of their group; step 9 takes the
    highest-index qualifying blank. If ``trace`` is a list, a
    ``(step, snapshot)`` pair is appended after each step.
    """
    check_hypotheses(code, mt)
    fam = CircleFamily(layout)
    r = layout.r
    edges = mt.edges()
    for i, mu in enumerate(mt.maximal):
        fam.circles[(i,)] = CircleLabeling((i,), mu, [None] * r)
    for e in edges:
        fam.circles[e] = CircleLabeling(e, mt.meets[e], [None] * r)

    def record(step):
        if trace is not None:
            trace.append((step, fam.snapshot()))

    record("interiors")

    def incident(i):
        return [e for e in edges if i in e]

    # words of C|mu_i missing every meet at i
    span = layout.span(UNLABELED)
    for i, mu in enumerate(mt.maximal):
        circle = fam.circles[(i,)]
        words = [t for t in canonical(restrict(code, mu).words)
                 if all(not (t & mt.meets[e]) for e in incident(i))]
        free = _blanks(circle, span)
        if len(words) > len(free):
            raise CapacityExceeded(f"{fiber_name((i,))}: {len(words)} words for {len(free)} unlabeled segments")
        for t, w in zip(free, words):
            circle.segments[t] = w
    record("step6")

    # proper subwords of each meet, each on a run of 2^k2 - 1 segments
    run = layout.run
    for e in edges:
        sigma = mt.meets[e]
        circle = fam.circles[e]
        span = layout.span(PLAIN, e)
        subwords = [t for t in canonical(restrict(code, sigma).words) if t != sigma]
        if len(subwords) * run > len(span):
            raise CapacityExceeded(
                f"{fiber_name(e)}: {len(subwords)} subwords need {len(subwords) * run} segments, have {len(span)}")
        for t in subwords:
            free = _blanks(circle, span)[:run]
            for idx in free:
                circle.segments[idx] = t
    record("step7")

    # words strictly between a meet and the maximal word
    for i, mu in enumerate(mt.maximal):
        circle = fam.circles[(i,)]
        for e in incident(i):
            sigma = mt.meets[e]
            span = layout.span(PRIME, e)
            words = [t for t in canonical(restrict(code, mu).words) if sigma < t < mu]
            free = _blanks(circle, span)
            if len(words) > len(free):
                raise CapacityExceeded(f"{fiber_name((i,))}: {len(words)} words for group {span.name()}")
            for t, w in zip(free, words):
                circle.segments[t] = w
    record("step8")

    # words meeting a meet partially, placed over their trace in the meet circle
    for i, mu in enumerate(mt.maximal):
        circle = fam.circles[(i,)]
        for tau in canonical(restrict(code, mu).words):
            for e in incident(i):
                sigma = mt.meets[e]
                nu = tau & sigma
                if not nu or tau <= sigma or sigma <= tau:
                    continue
                meet_circle = fam.circles[e]
                span = layout.span(PLAIN, e)
                free = [t for t in _blanks(circle, span) if meet_circle.segments[t] == nu]
                if not free:
                    raise CapacityExceeded(
                        f"{fiber_name((i,))}: no blank segment in {span.name()} over {nu} for {tau}")
                circle.segments[free[-1]] = tau
    record("step9")
    return fam


def propagate(fam: CircleFamily, mt: MeetTable, trace: list | None = None) -> CircleFamily:
    """Fill blanks from corresponding segments until nothing changes.

    Each pass collects candidates from the labels present at the start of
    the pass, so one pass moves a label across at most one circle boundary.
    Returns a new family; ``fam`` is left untouched.
    """
    fam = copy.deepcopy(fam)
    edges = [f for f in fam.edge_fibers()]
    passes = 0
    while True:
        snap = fam.snapshot()
        updates: dict[tuple[Fiber, int], tuple[CodeWord, list]] = {}

        def propose(fiber, t, label, source):
            cands = updates.setdefault((fiber, t), (label, []))
            cands[1].append((source, label))
            if cands[0] != label:
                raise PropagationConflict(fiber, t, cands[1])

        for e in edges:
            sigma = fam.circles[e].interior
            for t in range(fam.r):
                if snap[e][t] is not None:
                    continue
                for v in e:
                    tau = snap[(v,)][t]
                    if tau is not None and tau & sigma:
                        propose(e, t, tau & sigma, (v,))
        for v in fam.vertex_fibers():
            for t in range(fam.r):
                if snap[v][t] is not None:
                    continue
                for e in edges:
                    if v[0] in e and snap[e][t]:
                        propose(v, t, snap[e][t], e)
        if not updates:
            break
        for (fiber, t), (label, _) in updates.items():
            fam.circles[fiber].segments[t] = label
        passes += 1
        if trace is not None:
            trace.append((f"pass{passes}", fam.snapshot()))
        if passes > fam.r * max(1, len(fam.circles)):
            raise AssertionError("propagation did not reach a fixpoint")
    return fam


@dataclass
class PropertyReport:
    results: dict[str, bool]
    witnesses: dict[str, list]

    @property
    def ok(self) -> bool:
        return all(self.results.values())


def check_output_properties(fam: CircleFamily, code: NeuralCode, mt: MeetTable) -> PropertyReport:
    labels = set()
    for c in fam.circles.values():
        labels.update(c.labels())
    wit: dict[str, list] = {"a": [], "b": [], "c": [], "d": []}

    wit["a"] = [w for w in code if w not in labels]
    wit["b"] = sorted((w for w in labels if w not in code), key=CodeWord.sort_key)
    for f in fam.fibers():
        c = fam.circles[f]
        for t, w in enumerate(c.segments):
            if w is not None and not w <= c.interior:
                wit["c"].append((fiber_name(f), t, w))
    for e in fam.edge_fibers():
        ce = fam.circles[e]
        sigma = ce.interior
        for v in e:
            cv = fam.circles[(v,)]
            mu = cv.interior
            for t in range(fam.r):
                tv = cv.segments[t] or EMPTY
                te = ce.segments[t] or EMPTY
                if not (tv & te == tv & sigma == mu & te):
                    wit["d"].append((fiber_name((v,)), fiber_name(e), t, tv, te))
    return PropertyReport({k: not v for k, v in wit.items()}, wit)


def classify_codeword(tau: CodeWord, mt: MeetTable) -> set[str]:
    """Which of the four coverage classes (A to D) contain ``tau``.

    A: maximal words and meets; B: proper subwords of a meet; C: words
    strictly between a meet and one of its maximal words; D: words
    comparable with no meet.
    """
    meets = list(mt.meets.items())
    classes = set()
    if tau in mt.maximal or any(tau == s for _, s in meets):
        classes.add("A")
    if any(tau < s for _, s in meets):
        classes.add("B")
    if any(s < tau < mt.maximal[k] for (i, j), s in meets for k in (i, j)):
        classes.add("C")
    if all(not (tau <= s) and not (s <= tau) for _, s in meets):
        classes.add("D")
    return classes


@dataclass
class Realization:
    code: NeuralCode
    mt: MeetTable
    constants: Constants
    family: CircleFamily
    trace: list = field(default_factory=list)


def realize(code: NeuralCode, trace: bool = False) -> Realization:
    """Run the full labeling: constants, groups, steps 1 to 9 and propagation."""
    mt = maximal_codewords(code)
    k = compute_constants(code, mt)
    layout = plan_groups(k, mt)
    steps: list | None = [] if trace else None
    fam = build_circles(code, mt, layout, steps)
    fam = propagate(fam, mt, steps)
    return Realization(code, mt, k, fam, steps or [])
