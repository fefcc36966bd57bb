"""Dependency and grammatical-relation preciseness."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Mapping

from .constituency import f_score
from .corpus import ABSENT, DepGraph, GrRelation, GrSet, Source, _text, is_punct
from .errors import InputError, TokenCountMismatch, UnknownRelation

CORRECT, INCORRECT, MISSING, SPURIOUS = "correct", "incorrect", "missing", "spurious"


def _pairs(gold, test):
    if isinstance(gold, DepGraph):
        return [(gold, test)]
    return list(zip(gold, test, strict=True))


@dataclass(frozen=True)
class DepScorecard:
    """Counts behind UAS, LAS, DA, RA, CM and labelled CM."""

    n_tokens: int = 0
    uas_correct: int = 0
    las_correct: int = 0
    n_nonroot: int = 0
    da_correct: int = 0
    n_sentences: int = 0
    ra_correct: int = 0
    cm_correct: int = 0
    lcm_correct: int = 0

    def __add__(self, other: DepScorecard) -> DepScorecard:
        return DepScorecard(*(a + b for a, b in zip(self.counts(), other.counts())))

    def counts(self) -> tuple[int, ...]:
        return (self.n_tokens, self.uas_correct, self.las_correct, self.n_nonroot, self.da_correct,
                self.n_sentences, self.ra_correct, self.cm_correct, self.lcm_correct)

    def _raw(self) -> dict[str, tuple[int, int]]:
        return {"uas": (self.uas_correct, self.n_tokens), "las": (self.las_correct, self.n_tokens),
                "da": (self.da_correct, self.n_nonroot), "ra": (self.ra_correct, self.n_sentences),
                "cm": (self.cm_correct, self.n_sentences),
                "labeled_cm": (self.lcm_correct, self.n_sentences)}

    def fractions(self) -> dict[str, Fraction]:
        """Exact ratios; a measure with an empty denominator is omitted."""
        return {k: Fraction(n, d) for k, (n, d) in self._raw().items() if d}

    def as_dict(self) -> dict:
        out = {}
        for k, (n, d) in self._raw().items():
            out[k] = n / d if d else 0.0
            out[f"{k}_count"] = f"{n}/{d}"
        return out

    uas = property(lambda self: self.as_dict()["uas"])
    las = property(lambda self: self.as_dict()["las"])
    da = property(lambda self: self.as_dict()["da"])
    ra = property(lambda self: self.as_dict()["ra"])
    cm = property(lambda self: self.as_dict()["cm"])
    labeled_cm = property(lambda self: self.as_dict()["labeled_cm"])


def _sentence_scores(gold: DepGraph, test: DepGraph, ignore_punct: bool) -> DepScorecard:
    n = uas = las = nonroot = da = 0
    all_heads = all_labels = True
    for tok, gh, th, gl, tl in zip(gold.tokens, gold.heads, test.heads, gold.labels, test.labels):
        head_ok = gh == th
        label_ok = gl == tl
        if ignore_punct and is_punct(tok.form):
            continue
        n += 1
        uas += head_ok
        las += head_ok and label_ok
        if gh != 0:
            nonroot += 1
            da += head_ok
        all_heads &= head_ok
        all_labels &= label_ok
    ra = set(gold.roots) == set(test.roots)
    return DepScorecard(n, uas, las, nonroot, da, 1, int(ra), int(all_heads),
                        int(all_heads and all_labels))


def dep_scores(gold, test, *, ignore_punct: bool = False) -> DepScorecard:
    """Score one :class:`DepGraph` pair or aligned sequences of them.

    A token is attached correctly when its test head equals its gold head
    (0 for a root). ``ignore_punct`` drops punctuation tokens from the token
    counts and from the complete-match test.
    """
    card = DepScorecard()
    for i, (g, t) in enumerate(_pairs(gold, test), 1):
        if len(g) != len(t):
            raise TokenCountMismatch(f"{len(g)} gold tokens vs {len(t)} test tokens", sentence=i)
        card = card + _sentence_scores(g, t, ignore_punct)
    return card


@dataclass(frozen=True)
class LinResult:
    categories: tuple[str, ...]
    n_correct_links: int
    n_gold_links: int
    n_test_links: int

    @property
    def precision(self) -> float:
        return self.n_correct_links / self.n_test_links if self.n_test_links else 1.0

    @property
    def recall(self) -> float:
        return self.n_correct_links / self.n_gold_links if self.n_gold_links else 1.0

    def __add__(self, other: LinResult) -> LinResult:
        return LinResult(self.categories + other.categories,
                         self.n_correct_links + other.n_correct_links,
                         self.n_gold_links + other.n_gold_links,
                         self.n_test_links + other.n_test_links)

    def tally(self) -> Counter:
        return Counter(self.categories)


def lin_classify(gold, test, labeled: bool = False) -> LinResult:
    """Four-way classification of every token's link.

    correct: same head in both (or no head in both); incorrect: heads differ
    (or, when ``labeled``, labels differ); missing: linked only in gold;
    spurious: linked only in test.
    """
    result = LinResult((), 0, 0, 0)
    for i, (g, t) in enumerate(_pairs(gold, test), 1):
        if len(g) != len(t):
            raise TokenCountMismatch(f"{len(g)} gold tokens vs {len(t)} test tokens", sentence=i)
        cats = []
        correct_links = 0
        for gh, th, gl, tl in zip(g.heads, t.heads, g.labels, t.labels):
            if gh == 0 and th == 0:
                cats.append(CORRECT)
            elif gh == 0:
                cats.append(SPURIOUS)
            elif th == 0:
                cats.append(MISSING)
            elif gh == th and (not labeled or gl == tl):
                cats.append(CORRECT)
                correct_links += 1
            else:
                cats.append(INCORRECT)
        gold_links = sum(h != 0 for h in g.heads)
        test_links = sum(h != 0 for h in t.heads)
        result = result + LinResult(tuple(cats), correct_links, gold_links, test_links)
    return result


# ---------------------------------------------------------------------------
# grammatical relations

@dataclass(frozen=True)
class GrHierarchy:
    parents: Mapping[str, str] = field(default_factory=dict)
    tolerant: frozenset = frozenset()
    open_type: frozenset = frozenset()
    root: str = "dependent"

    def __post_init__(self):
        for name in self.parents:
            seen = {name}
            node = name
            while node in self.parents:
                node = self.parents[node]
                if node in seen:
                    raise InputError(f"relation hierarchy has a cycle through {name!r}")
                seen.add(node)
            if node != self.root:
                raise InputError(f"relation {name!r} does not descend from {self.root!r}")

    @classmethod
    def identity(cls) -> GrHierarchy:
        """No parents: only identical relation names match."""
        return cls()

    @classmethod
    def default(cls) -> GrHierarchy:
        text = resources.files("fepa_bench.data").joinpath("gr_hierarchy.tsv").read_text("utf-8")
        return read_hierarchy(text)

    def known(self, name: str) -> bool:
        return name == self.root or name in self.parents

    def ancestors(self, name: str) -> list[str]:
        out = []
        while name in self.parents:
            name = self.parents[name]
            out.append(name)
        return out

    def in_family(self, name: str, family: str) -> bool:
        return name == family or family in self.ancestors(name)

    def compatible(self, gold: str, test: str) -> bool:
        if gold == test:
            return True
        if self.parents.get(gold) == test or self.parents.get(test) == gold:
            return any(self.in_family(gold, f) and self.in_family(test, f) for f in self.tolerant)
        return False

    def has_type_slot(self, name: str) -> bool:
        return any(self.in_family(name, r) for r in self.open_type)


def read_hierarchy(stream: Source) -> GrHierarchy:
    """Parse ``child<TAB>parent`` lines plus ``@tolerant``/``@open_type`` directives."""
    parents, tolerant, open_type = {}, set(), set()
    for lineno, line in enumerate(_text(stream).splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputError(f"expected two fields, got {len(parts)}", line=lineno)
        if parts[0] == "@tolerant":
            tolerant.add(parts[1])
        elif parts[0] == "@open_type":
            open_type.add(parts[1])
        elif parts[0].startswith("@"):
            raise InputError(f"unknown directive {parts[0]!r}", line=lineno)
        else:
            parents[parts[0]] = parts[1]
    return GrHierarchy(parents, frozenset(tolerant), frozenset(open_type))


@dataclass(frozen=True)
class _Slots:
    type: str | None
    head: str
    dep: str
    extras: tuple[str, ...]


def _slots(rel: GrRelation, hierarchy: GrHierarchy) -> _Slots:
    args = rel.args
    if hierarchy.has_type_slot(rel.name) and len(args) >= 3:
        return _Slots(args[0], args[1], args[2], args[3:])
    return _Slots(None, args[0], args[1], args[2:])


def _ref_match(a: str, b: str) -> bool:
    """Compare token references by form; a ``:index`` suffix on both sides must agree."""
    def split(ref):
        form, sep, idx = ref.rpartition(":")
        return (form, idx) if sep and form and idx.isdigit() else (ref, None)

    (fa, ia), (fb, ib) = split(a), split(b)
    return fa == fb and (ia is None or ib is None or ia == ib)


def _slot_match(a: str | None, b: str | None) -> bool:
    return a is None or b is None or a == ABSENT or b == ABSENT or a == b


def _relations_match(g: GrRelation, t: GrRelation, hierarchy: GrHierarchy) -> bool:
    if not hierarchy.compatible(g.name, t.name):
        return False
    gs, ts = _slots(g, hierarchy), _slots(t, hierarchy)
    if not (_ref_match(gs.head, ts.head) and _ref_match(gs.dep, ts.dep)):
        return False
    if not _slot_match(gs.type, ts.type):
        return False
    return all(_slot_match(a, b) for a, b in zip(gs.extras, ts.extras))


@dataclass(frozen=True)
class GrResult:
    n_matched: int
    n_gold: int
    n_test: int
    gold_counts: Counter = field(default_factory=Counter)
    test_counts: Counter = field(default_factory=Counter)
    matched_gold: Counter = field(default_factory=Counter)
    matched_test: Counter = field(default_factory=Counter)
    confusion: Counter = field(default_factory=Counter)

    @property
    def precision(self) -> float:
        return self.n_matched / self.n_test if self.n_test else 1.0

    @property
    def recall(self) -> float:
        return self.n_matched / self.n_gold if self.n_gold else 1.0

    @property
    def f_score(self) -> float:
        return f_score(self.precision, self.recall)

    def __add__(self, other: GrResult) -> GrResult:
        return GrResult(self.n_matched + other.n_matched, self.n_gold + other.n_gold,
                        self.n_test + other.n_test, self.gold_counts + other.gold_counts,
                        self.test_counts + other.test_counts,
                        self.matched_gold + other.matched_gold,
                        self.matched_test + other.matched_test, self.confusion + other.confusion)

    def per_relation(self) -> dict[str, dict[str, float]]:
        """Precision (over test relations) and recall (over gold relations) per name."""
        out = {}
        for name in sorted(set(self.gold_counts) | set(self.test_counts)):
            g, t = self.gold_counts[name], self.test_counts[name]
            out[name] = {
                "precision": self.matched_test[name] / t if t else None,
                "recall": self.matched_gold[name] / g if g else None,
                "n_gold": g, "n_test": t,
            }
        return out


def gr_match(gold, test, hierarchy: GrHierarchy | None = None, *, strict: bool = False) -> GrResult:
    """Match test relations to gold relations, tolerating hierarchy neighbours.

    Gold relations are taken in file order; each picks the first unused test
    relation with the same name, else the first unused compatible one.
    ``confusion`` counts (gold name, test name) pairs, with None standing in
    for an unmatched side.
    """
    hierarchy = hierarchy if hierarchy is not None else GrHierarchy.default()
    if isinstance(gold, GrSet):
        gold, test = [gold], [test]
    total = GrResult(0, 0, 0)
    for g_set, t_set in zip(gold, test, strict=True):
        total = total + _match_sentence(g_set, t_set, hierarchy, strict)
    return total


def _match_sentence(gold: GrSet, test: GrSet, hierarchy: GrHierarchy, strict: bool) -> GrResult:
    if strict:
        for rel in (*gold.relations, *test.relations):
            if not hierarchy.known(rel.name):
                raise UnknownRelation(f"relation {rel.name!r} is not in the hierarchy")
    used = [False] * len(test.relations)
    confusion: Counter = Counter()
    matched_gold: Counter = Counter()
    matched_test: Counter = Counter()
    for g in gold.relations:
        choice = None
        for exact in (True, False):
            for j, t in enumerate(test.relations):
                if used[j] or (t.name == g.name) != exact:
                    continue
                if _relations_match(g, t, hierarchy):
                    choice = j
                    break
            if choice is not None:
                break
        if choice is None:
            confusion[(g.name, None)] += 1
            continue
        used[choice] = True
        t = test.relations[choice]
        confusion[(g.name, t.name)] += 1
        matched_gold[g.name] += 1
        matched_test[t.name] += 1
    for j, t in enumerate(test.relations):
        if not used[j]:
            confusion[(None, t.name)] += 1
    return GrResult(sum(used), len(gold), len(test),
                    Counter(r.name for r in gold.relations), Counter(r.name for r in test.relations),
                    matched_gold, matched_test, confusion)
