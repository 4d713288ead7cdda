"""Codewords, neural codes and their maximal-codeword structure."""

from __future__ import annotations

import itertools
import re
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Iterator


class ParseError(ValueError):
    """Raised when a code file cannot be read."""


@dataclass(frozen=True, order=False)
class CodeWord:
    """A set of active neurons stored as a bit vector.

    Neuron ``k`` (1-based) is active iff bit ``k - 1`` of ``bits`` is set.
    """

    bits: int = 0

    def __post_init__(self) -> None:
        if self.bits < 0:
            raise ValueError(f"negative bit pattern {self.bits}")

    @classmethod
    def of(cls, neurons: Iterable[int]) -> CodeWord:
        bits = 0
        for k in neurons:
            if k < 1:
                raise ValueError(f"neuron indices are 1-based, got {k}")
            bits |= 1 << (k - 1)
        return cls(bits)

    @classmethod
    def parse(cls, text: str) -> CodeWord:
        """Read ``"134"``, ``"1 3 4"`` or ``"1,3,12"``; digits run together only below 10."""
        text = text.strip()
        if text in ("", "-", "{}"):
            return cls()
        text = text.strip("{}")
        if re.search(r"[\s,]", text):
            return cls.of(int(tok) for tok in re.split(r"[\s,]+", text) if tok)
        return cls.of(int(ch) for ch in text)

    def __iter__(self) -> Iterator[int]:
        bits, k = self.bits, 1
        while bits:
            if bits & 1:
                yield k
            bits >>= 1
            k += 1

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __contains__(self, neuron: int) -> bool:
        return neuron >= 1 and bool(self.bits >> (neuron - 1) & 1)

    def __and__(self, other: CodeWord) -> CodeWord:
        return CodeWord(self.bits & other.bits)

    def __or__(self, other: CodeWord) -> CodeWord:
        return CodeWord(self.bits | other.bits)

    def __sub__(self, other: CodeWord) -> CodeWord:
        return CodeWord(self.bits & ~other.bits)

    def __le__(self, other: CodeWord) -> bool:
        return self.bits & ~other.bits == 0

    def __lt__(self, other: CodeWord) -> bool:
        return self <= other and self.bits != other.bits

    def __ge__(self, other: CodeWord) -> bool:
        return other <= self

    def __gt__(self, other: CodeWord) -> bool:
        return other < self

    @property
    def width(self) -> int:
        """Smallest ``n`` this word fits in."""
        return self.bits.bit_length()

    def sort_key(self) -> tuple:
        """Canonical order: larger words first, then by bit pattern read from neuron 1.

        Among equal-size words the one lacking the first differing neuron comes
        first, so ``234`` precedes ``134``.
        """
        return (-len(self), tuple(-k for k in self))

    def to_list(self) -> list[int]:
        return list(self)

    def __str__(self) -> str:
        if not self.bits:
            return "-"
        elems = list(self)
        if elems[-1] < 10:
            return "".join(map(str, elems))
        return "{" + ",".join(map(str, elems)) + "}"

    def __repr__(self) -> str:
        return f"CodeWord({self})"


EMPTY = CodeWord()


def canonical(words: Iterable[CodeWord]) -> list[CodeWord]:
    return sorted(words, key=CodeWord.sort_key)


@dataclass(frozen=True)
class NeuralCode:
    """A neural code on ``n`` neurons.

    ``words`` holds the nonempty codewords; the empty codeword is always
    considered a member.
    """

    n: int
    words: frozenset[CodeWord]

    def __init__(self, words: Iterable[CodeWord | str | Iterable[int]] = (), n: int | None = None):
        ws = set()
        for w in words:
            if isinstance(w, str):
                w = CodeWord.parse(w)
            elif not isinstance(w, CodeWord):
                w = CodeWord.of(w)
            if w:
                ws.add(w)
        width = max((w.width for w in ws), default=0)
        if n is None:
            n = width
        elif width > n:
            raise ValueError(f"codeword needs {width} neurons but n={n}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "words", frozenset(ws))

    def __contains__(self, word: CodeWord) -> bool:
        return not word or word in self.words

    def __iter__(self) -> Iterator[CodeWord]:
        return iter(canonical(self.words))

    def __len__(self) -> int:
        return len(self.words)

    def all_words(self) -> list[CodeWord]:
        """Nonempty words in canonical order followed by the empty word."""
        return canonical(self.words) + [EMPTY]

    def __str__(self) -> str:
        return "{" + ", ".join(str(w) for w in self) + "}"


def parse_code(text: str) -> NeuralCode:
    """Parse the line-oriented code file format.

    An optional ``n=<int>`` header fixes the neuron count. Every other line
    is one codeword given as whitespace-separated 1-based neuron indices; a
    blank line or ``-`` is the empty codeword and ``#`` starts a comment.
    """
    declared: int | None = None
    words: list[CodeWord] = []
    seen: set[CodeWord] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        m = re.fullmatch(r"n\s*=\s*(\S+)", line)
        if m:
            if declared is not None or words:
                raise ParseError(f"line {lineno}: header must come first")
            try:
                declared = int(m.group(1))
            except ValueError:
                raise ParseError(f"line {lineno}: bad neuron count {m.group(1)!r}") from None
            if declared < 0:
                raise ParseError(f"line {lineno}: negative neuron count")
            continue
        if line in ("", "-"):
            word = EMPTY
        else:
            neurons = []
            for tok in line.split():
                if not tok.isdigit():
                    raise ParseError(f"line {lineno}: malformed token {tok!r}")
                k = int(tok)
                if k < 1:
                    raise ParseError(f"line {lineno}: neuron indices start at 1")
                if declared is not None and k > declared:
                    raise ParseError(f"line {lineno}: neuron {k} exceeds n={declared}")
                neurons.append(k)
            word = CodeWord.of(neurons)
        if word in seen and word:
            warnings.warn(f"line {lineno}: duplicate codeword {word}", stacklevel=2)
        seen.add(word)
        words.append(word)
    return NeuralCode(words, n=declared)


def format_code(code: NeuralCode) -> str:
    lines = [f"n={code.n}"]
    lines += [" ".join(map(str, w)) for w in code]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class MeetTable:
    """Maximal codewords in canonical order and their nonempty pairwise meets.

    Indices into ``maximal`` are 0-based; ``meets`` is keyed by ``(i, j)``
    with ``i < j``.
    """

    maximal: tuple[CodeWord, ...]
    meets: dict[tuple[int, int], CodeWord] = field(hash=False)

    @property
    def s(self) -> int:
        return len(self.maximal)

    @property
    def s_prime(self) -> int:
        return len(self.meets)

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.meets)

    def meet(self, i: int, j: int) -> CodeWord:
        return self.maximal[i] & self.maximal[j]


def maximal_codewords(code: NeuralCode) -> MeetTable:
    words = canonical(code.words)
    maximal = [w for w in words if not any(w < v for v in words)]
    meets = {}
    for i, j in itertools.combinations(range(len(maximal)), 2):
        m = maximal[i] & maximal[j]
        if m:
            meets[(i, j)] = m
    return MeetTable(tuple(maximal), meets)


def restrict(code: NeuralCode, sigma: CodeWord) -> NeuralCode:
    """The words of ``code`` contained in ``sigma`` (containment taken as non-strict)."""
    return NeuralCode((w for w in code.words if w <= sigma), n=code.n)


def _intersection(words: Iterable[CodeWord]) -> CodeWord:
    acc = None
    for w in words:
        acc = w if acc is None else acc & w
    return acc if acc is not None else EMPTY


def is_max_intersection_complete(
    code: NeuralCode, mt: MeetTable | None = None
) -> tuple[bool, tuple[tuple[int, ...], CodeWord] | None]:
    """Check that every intersection of two or more maximal words is in the code.

    Returns ``(ok, witness)``; the witness is the first failing subset of
    maximal-word indices together with its intersection.
    """
    mt = mt or maximal_codewords(code)
    for size in range(2, mt.s + 1):
        for subset in itertools.combinations(range(mt.s), size):
            inter = _intersection(mt.maximal[k] for k in subset)
            if inter not in code:
                return False, (subset, inter)
    return True, None


@dataclass(frozen=True)
class StrongWitness:
    tau: CodeWord
    subset: tuple[int, ...]
    missing: CodeWord


def is_strongly_mic(
    code: NeuralCode, mt: MeetTable | None = None
) -> tuple[bool, StrongWitness | None]:
    """Brute-force check of ``tau & mu_1 & ... & mu_t in code``.

    Enumerates every nonempty subset of maximal words against every word.
    """
    mt = mt or maximal_codewords(code)
    words = canonical(code.words)
    for size in range(1, mt.s + 1):
        for subset in itertools.combinations(range(mt.s), size):
            inter = _intersection(mt.maximal[k] for k in subset)
            for tau in words:
                w = tau & inter
                if w not in code:
                    return False, StrongWitness(tau, subset, w)
    return True, None


@dataclass(frozen=True)
class Constants:
    sigma_size: int
    k1: int
    k2: int
    r: int
    s: int = 0
    s_prime: int = 0

    @staticmethod
    def segment_count(k1: int, k2: int, sigma_size: int, s_prime: int) -> int:
        if s_prime == 0:
            return 2**k1 - 1
        return 2**k1 - 1 + s_prime * ((2**k2 - 1) * sigma_size + (2**k2 - 2))


def compute_constants(code: NeuralCode, mt: MeetTable | None = None) -> Constants:
    """Segment-budget constants for the circle labeling.

    ``sigma_size`` counts the nonempty words under each meet, minus one.
    With no nonempty meets ``sigma_size`` and ``k2`` are 0.
    """
    mt = mt or maximal_codewords(code)
    k1 = 0
    for i, mu in enumerate(mt.maximal):
        others = _union(m for k, m in enumerate(mt.maximal) if k != i)
        k1 = max(k1, len(mu - others))
    sigma_size = 0
    k2 = 0
    for (i, j), sigma in mt.meets.items():
        sigma_size = max(sigma_size, len(restrict(code, sigma)) - 1)
        k2 = max(k2, len(mt.maximal[i] - sigma), len(mt.maximal[j] - sigma))
    r = Constants.segment_count(k1, k2, sigma_size, mt.s_prime)
    return Constants(sigma_size, k1, k2, r, mt.s, mt.s_prime)


def _union(words: Iterable[CodeWord]) -> CodeWord:
    acc = EMPTY
    for w in words:
        acc = acc | w
    return acc


@dataclass(frozen=True)
class BoundEntry:
    rule: str
    bound: int
    detail: str = ""


@dataclass
class BoundReport:
    applicable: list[BoundEntry]
    checked: dict[str, bool]

    @property
    def best(self) -> int | None:
        return min((e.bound for e in self.applicable), default=None)

    def bound_for(self, rule: str) -> int | None:
        for e in self.applicable:
            if e.rule == rule:
                return e.bound
        return None


# Rule names used in BoundReport entries.
DISJOINT_MAXIMAL = "disjoint-maximal"
MAX_INTERSECTION = "max-intersection-complete"
GRID_THEOREM = "quasi-square-grid"
PATHS = "path-forest"
CYCLES = "disjoint-cycles"


def dimension_bound(code: NeuralCode, mt: MeetTable | None = None) -> BoundReport:
    """Collect every upper bound on the minimal embedding dimension whose hypothesis holds."""
    from convexcode import code_graph

    mt = mt or maximal_codewords(code)
    entries: list[BoundEntry] = []
    checked: dict[str, bool] = {}

    checked[DISJOINT_MAXIMAL] = mt.s_prime == 0
    if checked[DISJOINT_MAXIMAL]:
        entries.append(BoundEntry(DISJOINT_MAXIMAL, 2, "maximal codewords pairwise disjoint"))

    mic, _ = is_max_intersection_complete(code, mt)
    checked[MAX_INTERSECTION] = mic
    if mic:
        entries.append(BoundEntry(MAX_INTERSECTION, max(2, mt.s - 1), f"s={mt.s}"))

    strong, _ = is_strongly_mic(code, mt)
    g = code_graph.build_gc(mt)
    cycles = code_graph.analyze_cycles(g)

    checked[PATHS] = strong and code_graph.is_path_forest(g)
    if checked[PATHS]:
        entries.append(BoundEntry(PATHS, 3, "G_C is a union of disjoint paths"))

    checked[CYCLES] = strong and cycles.D is not None
    if checked[CYCLES]:
        entries.append(BoundEntry(CYCLES, cycles.D, f"{len(cycles.cycles)} disjoint cycles"))

    emb = code_graph.best_embedding(g, cycles) if strong and not cycles.has_3_cycle else None
    checked[GRID_THEOREM] = emb is not None
    if emb is not None:
        entries.append(BoundEntry(GRID_THEOREM, emb.d + 2, f"grid embedding in dimension {emb.d}"))

    return BoundReport(entries, checked)
