"""Phrase-structure preciseness: PARSEVAL, crossing brackets, leaf-ancestor."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .corpus import PhraseTree, Source, _text
from .errors import InputError, TerminalMismatch, TokenCountMismatch

OPEN, CLOSE = "[", "]"


def _ratio(num: int, den: int, *, empty: float) -> float:
    return num / den if den else empty


def f_score(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class Span:
    start: int
    end: int
    label: str | None = None

    @property
    def bounds(self) -> tuple[int, int]:
        return self.start, self.end

    def crosses(self, other: Span) -> bool:
        i, j, k, l = self.start, self.end, other.start, other.end
        return i < k <= j < l or k < i <= l < j


@dataclass(frozen=True)
class SpanSet:
    """Multiset of (possibly labelled) spans over an ``n_tokens`` sentence."""

    spans: tuple[Span, ...]
    n_tokens: int

    def __post_init__(self):
        object.__setattr__(self, "spans", tuple(self.spans))
        for s in self.spans:
            if not 1 <= s.start <= s.end <= self.n_tokens:
                raise ValueError(f"span {s.bounds} outside 1..{self.n_tokens}")

    @classmethod
    def from_tree(cls, tree: PhraseTree, *, preterminals: bool = True, width1: bool = True,
                  root: bool = True) -> SpanSet:
        """Collect one span per nonterminal node.

        ``preterminals=False`` skips nodes that dominate exactly one terminal
        directly; ``width1=False`` drops every single-token span (evalb
        style); ``root=False`` drops the outermost node.
        """
        spans = []
        for node in tree.subtrees():
            if not root and node is tree:
                continue
            if not preterminals and node.is_preterminal:
                continue
            if not width1 and node.start == node.end:
                continue
            spans.append(Span(node.start, node.end, node.label))
        return cls(tuple(spans), tree.end)

    def __len__(self):
        return len(self.spans)

    def counter(self, labeled: bool) -> Counter:
        if labeled:
            return Counter((s.start, s.end, s.label) for s in self.spans)
        return Counter(s.bounds for s in self.spans)


def _as_spans(x) -> SpanSet:
    return SpanSet.from_tree(x) if isinstance(x, PhraseTree) else x


@dataclass(frozen=True)
class ParsevalScore:
    n_matched: int
    n_gold: int
    n_test: int

    @property
    def precision(self) -> float:
        return _ratio(self.n_matched, self.n_test, empty=1.0 if self.n_gold == 0 else 0.0)

    @property
    def recall(self) -> float:
        return _ratio(self.n_matched, self.n_gold, empty=1.0 if self.n_test == 0 else 0.0)

    @property
    def f_score(self) -> float:
        return f_score(self.precision, self.recall)

    def __add__(self, other: ParsevalScore) -> ParsevalScore:
        return ParsevalScore(self.n_matched + other.n_matched, self.n_gold + other.n_gold,
                             self.n_test + other.n_test)

    def as_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f_score": self.f_score,
                "n_matched": self.n_matched, "n_gold": self.n_gold, "n_test": self.n_test}


def parseval(gold, test, labeled: bool = False) -> ParsevalScore:
    """Bracket precision/recall; each gold span matches at most one test span."""
    gold, test = _as_spans(gold), _as_spans(test)
    if gold.n_tokens != test.n_tokens:
        raise TokenCountMismatch(f"{gold.n_tokens} gold tokens vs {test.n_tokens} test tokens")
    g, t = gold.counter(labeled), test.counter(labeled)
    return ParsevalScore(sum((g & t).values()), len(gold), len(test))


def crossing_brackets(gold, test) -> int:
    """Number of test spans crossing at least one gold span."""
    gold, test = _as_spans(gold), _as_spans(test)
    if gold.n_tokens != test.n_tokens:
        raise TokenCountMismatch(f"{gold.n_tokens} gold tokens vs {test.n_tokens} test tokens")
    gold_spans = set(s.bounds for s in gold.spans)
    return sum(any(Span(*g).crosses(s) for g in gold_spans) for s in test.spans)


@dataclass(frozen=True)
class CorpusParseval:
    score: ParsevalScore
    crossing_total: int
    n_sentences: int

    @property
    def crossing_mean(self) -> float:
        return self.crossing_total / self.n_sentences if self.n_sentences else 0.0


def parseval_corpus(golds: Iterable, tests: Iterable, labeled: bool = False) -> CorpusParseval:
    """Micro-averaged PARSEVAL and mean crossing brackets per sentence."""
    total = ParsevalScore(0, 0, 0)
    crossing = n = 0
    for i, (g, t) in enumerate(zip(golds, tests, strict=True), 1):
        try:
            total = total + parseval(g, t, labeled)
            crossing += crossing_brackets(g, t)
        except TokenCountMismatch as exc:
            raise TokenCountMismatch(str(exc), sentence=i) from None
        n += 1
    return CorpusParseval(total, crossing, n)


# ---------------------------------------------------------------------------
# leaf-ancestor

def lineages(tree: PhraseTree) -> list[tuple[str, ...]]:
    """Label path from each terminal up to the root, with boundary marks.

    ``[`` goes immediately before the label of the highest node that starts
    at the terminal and ``]`` immediately after the label of the highest node
    that ends there.
    """
    out = []

    def walk(node, path):
        for child in node.children:
            if isinstance(child, PhraseTree):
                walk(child, path + [child])
                continue
            chain = path[::-1]  # bottom-up
            opener = closer = None
            for anc in chain:
                if anc.start == child.index:
                    opener = anc
                if anc.end == child.index:
                    closer = anc
            symbols = []
            for anc in chain:
                if anc is opener:
                    symbols.append(OPEN)
                symbols.append(anc.label)
                if anc is closer:
                    symbols.append(CLOSE)
            out.append(tuple(symbols))

    walk(tree, [tree])
    return out


@dataclass(frozen=True)
class CostTable:
    """Replacement costs between node labels.

    Unlisted distinct pairs cost ``default``; identical symbols cost 0; a
    bracket replaced by anything else costs 2.
    """

    pairs: Mapping[frozenset, float] = field(default_factory=dict)
    default: float = 2.0

    def __post_init__(self):
        if not 0 <= self.default <= 2:
            raise ValueError("default cost must lie in [0, 2]")
        for key, cost in self.pairs.items():
            if not 0 <= cost <= 2:
                raise ValueError(f"cost {cost} for {sorted(key)} outside [0, 2]")

    @classmethod
    def from_pairs(cls, costs: Mapping[tuple[str, str], float], default: float = 2.0) -> CostTable:
        return cls({frozenset(k): float(v) for k, v in costs.items()}, default)

    def cost(self, a: str, b: str) -> float:
        if a == b:
            return 0.0
        if a in (OPEN, CLOSE) or b in (OPEN, CLOSE):
            return 2.0
        return self.pairs.get(frozenset((a, b)), self.default)


def read_cost_table(stream: Source, default: float = 2.0) -> CostTable:
    """Parse ``LABEL_A<TAB>LABEL_B<TAB>cost`` lines; ``#`` starts a comment."""
    costs = {}
    for lineno, line in enumerate(_text(stream).splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 3:
            raise InputError("cost line needs three fields", line=lineno)
        try:
            costs[(parts[0], parts[1])] = float(parts[2])
        except ValueError:
            raise InputError(f"bad cost {parts[2]!r}", line=lineno) from None
    try:
        return CostTable.from_pairs(costs, default)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def edit_distance(a, b, costs: CostTable | None = None) -> float:
    """Weighted Levenshtein distance: insert/delete 1, replace per ``costs``."""
    costs = costs or CostTable()
    prev = [float(j) for j in range(len(b) + 1)]
    for i, x in enumerate(a, 1):
        cur = [float(i)]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + costs.cost(x, y)))
        prev = cur
    return prev[-1]


def lineage_similarity(a, b, costs: CostTable | None = None) -> float:
    total = len(a) + len(b)
    if total == 0:
        return 1.0
    return 1 - edit_distance(a, b, costs) / total


@dataclass(frozen=True)
class LAScore:
    per_word: tuple[float, ...]
    exact_match: bool

    @property
    def sentence(self) -> float:
        return sum(self.per_word) / len(self.per_word) if self.per_word else 1.0


def la_score(gold_tree: PhraseTree, test_tree: PhraseTree, costs: CostTable | None = None) -> LAScore:
    gold_words, test_words = gold_tree.words(), test_tree.words()
    if gold_words != test_words:
        raise TerminalMismatch(f"terminals differ: {gold_words} vs {test_words}")
    gl, tl = lineages(gold_tree), lineages(test_tree)
    scores = tuple(lineage_similarity(g, t, costs) for g, t in zip(gl, tl))
    return LAScore(scores, gl == tl)


@dataclass(frozen=True)
class CorpusLA:
    word_mean: float
    sentence_mean: float
    exact_match_rate: float
    n_words: int
    n_sentences: int


def la_corpus(golds: Iterable[PhraseTree], tests: Iterable[PhraseTree],
              costs: CostTable | None = None) -> CorpusLA:
    words = []
    sentences = []
    exact = 0
    for i, (g, t) in enumerate(zip(golds, tests, strict=True), 1):
        try:
            s = la_score(g, t, costs)
        except TerminalMismatch as exc:
            raise TerminalMismatch(str(exc), sentence=i) from None
        words.extend(s.per_word)
        sentences.append(s.sentence)
        exact += s.exact_match
    n = len(sentences)
    return CorpusLA(sum(words) / len(words) if words else 0.0,
                    sum(sentences) / n if n else 0.0, exact / n if n else 0.0, len(words), n)
