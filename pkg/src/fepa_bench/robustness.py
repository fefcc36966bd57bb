"""Misspelling injection and robustness scoring.

Noise follows a single-edit rule: each altered word is one deletion,
insertion or adjacent transposition away from the original, insertions use
a key next to a neighbouring letter, and no altered word may be a known
word. Scores compare the parse of a correct sentence with the parse of its
noisy twin.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping, Sequence

from .constituency import ParsevalScore, SpanSet, parseval
from .corpus import DepGraph, GrSet, ParallelPair, PhraseTree, Source, _text
from .coverage import Verdict
from .errors import (
    EmptyLevel,
    ExhaustedCandidates,
    InputError,
    NoCorrections,
    NotEnoughAlterableWords,
    TokenCountMismatch,
)

log = logging.getLogger(__name__)

OPS = ("delete", "add", "transpose")


def read_keyboard(stream: Source) -> dict[str, str]:
    """Parse ``char: neighbours`` lines."""
    keyboard = {}
    for lineno, line in enumerate(_text(stream).splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        key, sep, neighbours = line.partition(":")
        key = key.strip()
        if not sep or len(key) != 1:
            raise InputError(f"bad keyboard line {line!r}", line=lineno)
        keyboard[key] = "".join(neighbours.split())
    return keyboard


def default_keyboard() -> dict[str, str]:
    return read_keyboard(resources.files("fepa_bench.data").joinpath("qwerty.txt").read_text("utf-8"))


def _split_core(word: str) -> tuple[str, str, str]:
    start, end = 0, len(word)
    while start < end and not word[start].isalpha():
        start += 1
    while end > start and not word[end - 1].isalpha():
        end -= 1
    return word[:start], word[start:end], word[end:]


def is_alterable(word: str) -> bool:
    """A word whose letters (ignoring leading/trailing punctuation) number two or more."""
    core = _split_core(word)[1]
    return len(core) >= 2 and core.isalpha()


@dataclass(frozen=True)
class NoiseSpec:
    keyboard: Mapping[str, str] = field(default_factory=default_keyboard)
    dictionary: frozenset = frozenset()
    ops: tuple[str, ...] = OPS
    errors_per_sentence: int = 1
    seed: int = 0

    def __post_init__(self):
        unknown = set(self.ops) - set(OPS)
        if unknown or not self.ops:
            raise ValueError(f"ops must be a non-empty subset of {OPS}, got {self.ops}")
        object.__setattr__(self, "dictionary", frozenset(w.lower() for w in self.dictionary))

    @classmethod
    def for_corpus(cls, sentences: Iterable[Sequence[str]], **kwargs) -> NoiseSpec:
        """Use every word core of ``sentences`` as the dictionary."""
        words = {_split_core(w)[1] for s in sentences for w in s}
        words.update(kwargs.pop("dictionary", ()))
        return cls(dictionary=frozenset(w for w in words if w), **kwargs)

    def with_level(self, level: int) -> NoiseSpec:
        return NoiseSpec(self.keyboard, self.dictionary, self.ops, level, self.seed)

    def rng(self, index: int = 0) -> random.Random:
        return random.Random(f"{self.seed}:{self.errors_per_sentence}:{index}")


def misspellings(word: str, spec: NoiseSpec) -> dict[str, list[str]]:
    """Legal single-edit misspellings of ``word`` grouped by operation.

    Only the letter core is edited; surrounding punctuation is kept.
    """
    prefix, core, suffix = _split_core(word)
    out: dict[str, list[str]] = {}
    if len(core) < 2 or not core.isalpha():
        return out
    raw: dict[str, list[str]] = {op: [] for op in spec.ops}
    if "delete" in raw:
        raw["delete"] = [core[:i] + core[i + 1:] for i in range(len(core))]
    if "transpose" in raw:
        raw["transpose"] = [core[:i] + core[i + 1] + core[i] + core[i + 2:]
                            for i in range(len(core) - 1) if core[i] != core[i + 1]]
    if "add" in raw:
        for i in range(1, len(core)):
            left, right = core[i - 1], core[i]
            keys = spec.keyboard.get(left.lower(), "") + spec.keyboard.get(right.lower(), "")
            upper = left.isupper() and right.isupper()
            for k in dict.fromkeys(keys):
                raw["add"].append(core[:i] + (k.upper() if upper else k) + core[i:])
    original = core.lower()
    for op, cands in raw.items():
        legal = [c for c in dict.fromkeys(cands)
                 if c and c.lower() != original and c.lower() not in spec.dictionary]
        if legal:
            out[op] = [prefix + c + suffix for c in legal]
    return out


@dataclass(frozen=True)
class NoisySentence:
    tokens: tuple[str, ...]
    positions: tuple[int, ...]  # 0-based, ascending
    ops: tuple[str, ...]


def inject_noise(sentence: Sequence[str], spec: NoiseSpec, rng: random.Random | None = None,
                 index: int = 0) -> NoisySentence:
    """Misspell exactly ``spec.errors_per_sentence`` distinct words.

    Deterministic for a given spec and ``index`` unless an explicit ``rng``
    is passed. A word with no legal misspelling is skipped in favour of
    another position.
    """
    level = spec.errors_per_sentence
    tokens = list(sentence)
    if level == 0:
        return NoisySentence(tuple(tokens), (), ())
    rng = rng or spec.rng(index)
    alterable = [i for i, w in enumerate(tokens) if is_alterable(w)]
    if len(alterable) < level:
        raise NotEnoughAlterableWords(
            f"{len(alterable)} alterable words, {level} errors requested", sentence=index)
    rng.shuffle(alterable)
    chosen = {}
    for i in alterable:
        options = misspellings(tokens[i], spec)
        if not options:
            continue
        op = rng.choice(sorted(options))
        chosen[i] = (op, rng.choice(options[op]))
        if len(chosen) == level:
            break
    else:
        raise ExhaustedCandidates(
            f"only {len(chosen)} of {level} words admit a legal misspelling", sentence=index)
    positions = tuple(sorted(chosen))
    for i in positions:
        tokens[i] = chosen[i][1]
    return NoisySentence(tuple(tokens), positions, tuple(chosen[i][0] for i in positions))


def generate_parallel(sentences: Sequence[Sequence[str]], spec: NoiseSpec,
                      levels: Iterable[int] = (1, 2, 3)) -> dict[int, list[ParallelPair]]:
    """Noisy copies of every sentence at each level.

    Sentences that cannot carry a level's errors are left out of that level.
    """
    out = {}
    for level in levels:
        level_spec = spec.with_level(level)
        pairs = []
        for i, s in enumerate(sentences):
            try:
                noisy = inject_noise(s, level_spec, index=i)
            except (NotEnoughAlterableWords, ExhaustedCandidates):
                log.info("sentence %d skipped at level %d", i, level)
                continue
            pairs.append(ParallelPair(tuple(s), noisy.tokens, len(noisy.positions)))
        out[level] = pairs
    return out


# ---------------------------------------------------------------------------
# similarity of two analyses

def _parts(a, strip_preterminals: bool):
    """(n_tokens, structure, labelled structure) of an analysis."""
    if isinstance(a, PhraseTree):
        a = SpanSet.from_tree(a, preterminals=not strip_preterminals)
    if isinstance(a, SpanSet):
        labeled = sorted((s.start, s.end, s.label or "") for s in a.spans)
        return a.n_tokens, [x[:2] for x in labeled], labeled
    if isinstance(a, DepGraph):
        return len(a), list(a.heads), list(zip(a.heads, a.labels))
    if isinstance(a, GrSet):
        labeled = sorted((r.args, r.name) for r in a.relations)
        return None, [x[0] for x in labeled], labeled
    raise TypeError(f"cannot compare analyses of type {type(a).__name__}")


def _compare(a, b, strip_preterminals):
    if a is None or b is None:  # parse failure on either side
        return False, False
    na, sa, la = _parts(a, strip_preterminals)
    nb, sb, lb = _parts(b, strip_preterminals)
    if na != nb:
        raise TokenCountMismatch(f"{na} vs {nb} tokens")
    return sa == sb, sa == sb and la == lb


def ulsim(a, b, *, strip_preterminals: bool = False) -> int:
    """1 when both analyses have the same structure, ignoring labels and word forms."""
    return int(_compare(a, b, strip_preterminals)[0])


def lsim(a, b, *, strip_preterminals: bool = False) -> int:
    """1 when structure and every label agree."""
    return int(_compare(a, b, strip_preterminals)[1])


def degradation(first: float, last: float) -> float:
    """Percentage drop from ``first`` to ``last``."""
    if first == 0:
        return 0.0 if last == 0 else float("-inf")
    return 100 * (first - last) / first


@dataclass(frozen=True)
class LevelScore:
    n: int
    ur_hits: int
    lr_hits: int

    @property
    def ur(self) -> float:
        return self.ur_hits / self.n

    @property
    def lr(self) -> float:
        return self.lr_hits / self.n


@dataclass(frozen=True)
class RobustnessReport:
    levels: Mapping[int, LevelScore]

    @property
    def first(self) -> int:
        return min(self.levels)

    @property
    def last(self) -> int:
        return max(self.levels)

    @property
    def ur(self) -> float:
        """UR pooled over all pairs of every level."""
        return sum(s.ur_hits for s in self.levels.values()) / sum(s.n for s in self.levels.values())

    @property
    def lr(self) -> float:
        return sum(s.lr_hits for s in self.levels.values()) / sum(s.n for s in self.levels.values())

    @property
    def ur_degradation(self) -> float:
        return degradation(self.levels[self.first].ur, self.levels[self.last].ur)

    @property
    def lr_degradation(self) -> float:
        return degradation(self.levels[self.first].lr, self.levels[self.last].lr)

    def as_dict(self) -> dict:
        return {
            "levels": {str(k): {"n": v.n, "ur": v.ur, "lr": v.lr, "ur_count": f"{v.ur_hits}/{v.n}",
                                "lr_count": f"{v.lr_hits}/{v.n}"}
                       for k, v in sorted(self.levels.items())},
            "ur": self.ur, "lr": self.lr,
            "ur_degradation": self.ur_degradation, "lr_degradation": self.lr_degradation,
        }


def robustness_scores(pairs_by_level: Mapping[int, Sequence[tuple]], *,
                      strip_preterminals: bool = False) -> RobustnessReport:
    """UR and LR per error level from (correct parse, noisy parse) pairs.

    ``None`` stands for a failed parse and scores 0 on both measures.
    """
    levels = {}
    for level, pairs in pairs_by_level.items():
        if not pairs:
            raise EmptyLevel(f"error level {level} has no sentence pairs")
        ur = lr = 0
        for i, (a, b) in enumerate(pairs, 1):
            try:
                u, l = _compare(a, b, strip_preterminals)
            except TokenCountMismatch as exc:
                raise TokenCountMismatch(f"level {level}: {exc}", sentence=i) from None
            ur += u
            lr += l
        levels[level] = LevelScore(len(pairs), ur, lr)
    return RobustnessReport(dict(sorted(levels.items())))


# ---------------------------------------------------------------------------
# best match against several corrections

@dataclass(frozen=True)
class FosterReport:
    per_item: tuple[float, ...]
    best: tuple[ParsevalScore, ...]

    @property
    def mean(self) -> float:
        return sum(self.per_item) / len(self.per_item) if self.per_item else 0.0

    @property
    def total(self) -> ParsevalScore:
        out = ParsevalScore(0, 0, 0)
        for s in self.best:
            out = out + s
        return out

    @property
    def precision(self) -> float:
        return self.total.precision

    @property
    def recall(self) -> float:
        return self.total.recall


def foster_scores(items: Sequence[tuple]) -> FosterReport:
    """Labelled PARSEVAL F of a noisy parse against its closest correction.

    ``items`` holds ``(noisy_parse, [correction_parse, ...])`` pairs; a noisy
    parse of ``None`` (failure) scores 0. Corpus precision and recall sum the
    bracket counts of each item's best-matching correction.
    """
    per_item, best = [], []
    for i, (noisy, corrections) in enumerate(items, 1):
        corrections = list(corrections)
        if not corrections:
            raise NoCorrections("item has no corrections", sentence=i)
        if noisy is None:
            gold = corrections[0]
            n_gold = len(gold) if isinstance(gold, SpanSet) else len(SpanSet.from_tree(gold))
            per_item.append(0.0)
            best.append(ParsevalScore(0, n_gold, 0))
            continue
        try:
            scores = [parseval(c, noisy, labeled=True) for c in corrections]
        except TokenCountMismatch as exc:
            raise TokenCountMismatch(str(exc), sentence=i) from None
        top = max(scores, key=lambda s: s.f_score)
        per_item.append(top.f_score)
        best.append(top)
    return FosterReport(tuple(per_item), tuple(best))


def stability(run_log) -> dict[str, float]:
    """Percentages of sentences terminated (crash/timeout) and failed."""
    verdicts = [Verdict(v) for v in getattr(run_log, "verdicts", run_log)]
    n = len(verdicts)
    if not n:
        return {"terminated_pct": 0.0, "failed_pct": 0.0, "n": 0}
    return {"terminated_pct": 100 * sum(v is Verdict.TERMINATED for v in verdicts) / n,
            "failed_pct": 100 * sum(v is Verdict.FAILED for v in verdicts) / n, "n": n}
