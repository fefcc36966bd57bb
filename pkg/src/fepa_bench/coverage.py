"""Parsing coverage, genre generalizability and n-gram error mining."""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import Source, _text
from .errors import BadVerdictLine, EmptyCorpus, InputError, MissingReferenceGenre


class Verdict(str, enum.Enum):
    COVERED = "covered"
    FRAGMENTED = "fragmented"
    FAILED = "failed"
    TERMINATED = "terminated"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class CoverageLedger:
    verdicts: tuple[Verdict, ...]
    genres: tuple[str | None, ...] = ()

    def __post_init__(self):
        verdicts = tuple(Verdict(v) for v in self.verdicts)
        object.__setattr__(self, "verdicts", verdicts)
        genres = tuple(self.genres) if self.genres else (None,) * len(verdicts)
        if len(genres) != len(verdicts):
            raise ValueError("one genre per verdict required")
        object.__setattr__(self, "genres", genres)

    def __len__(self):
        return len(self.verdicts)

    def tallies(self) -> dict[Verdict, int]:
        counts = Counter(self.verdicts)
        return {v: counts[v] for v in Verdict}

    def per_genre(self) -> dict[str | None, CoverageLedger]:
        groups: dict = {}
        for v, g in zip(self.verdicts, self.genres):
            groups.setdefault(g, []).append(v)
        return {g: CoverageLedger(tuple(vs), (g,) * len(vs)) for g, vs in groups.items()}


def coverage(ledger: CoverageLedger | Iterable) -> float:
    """Fraction of sentences judged covered; every other verdict counts against."""
    verdicts = ledger.verdicts if isinstance(ledger, CoverageLedger) else [Verdict(v) for v in ledger]
    if not verdicts:
        raise EmptyCorpus("coverage of an empty corpus is undefined")
    return sum(v is Verdict.COVERED for v in verdicts) / len(verdicts)


def genre_coverage(ledger: CoverageLedger) -> dict[str | None, float]:
    return {g: coverage(sub) for g, sub in ledger.per_genre().items()}


def generalizability(per_genre: Mapping[str, float], reference: str = "newspaper") -> float:
    """Lowest genre coverage as a percentage of the reference genre's coverage."""
    if reference not in per_genre:
        raise MissingReferenceGenre(f"reference genre {reference!r} not among {sorted(per_genre)}")
    ref = per_genre[reference]
    if ref == 0:
        raise InputError(f"reference genre {reference!r} has zero coverage")
    return 100 * min(per_genre.values()) / ref


def read_verdicts(stream: Source) -> tuple[CoverageLedger, list[list[str]]]:
    """Parse ``verdict<TAB>genre<TAB>text`` lines into a ledger and token lists.

    An empty genre field means no genre.
    """
    verdicts, genres, sentences = [], [], []
    for lineno, line in enumerate(_text(stream).splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise BadVerdictLine(f"expected 3 tab-separated fields, got {len(parts)}", line=lineno)
        try:
            verdicts.append(Verdict(parts[0].strip()))
        except ValueError:
            raise BadVerdictLine(f"unknown verdict {parts[0]!r}", line=lineno) from None
        genres.append(parts[1].strip() or None)
        sentences.append(parts[2].split())
    return CoverageLedger(tuple(verdicts), tuple(genres)), sentences


def write_verdicts(ledger: CoverageLedger, sentences: Sequence[Sequence[str]]) -> str:
    return "".join(f"{v.value}\t{g or ''}\t{' '.join(s)}\n"
                   for v, g, s in zip(ledger.verdicts, ledger.genres, sentences, strict=True))


# ---------------------------------------------------------------------------
# error mining

def extract_ngrams(sentence: Sequence[str], n: int) -> list[tuple[str, ...]]:
    """All contiguous windows of length ``n``, in order, duplicates kept."""
    if n < 1:
        raise ValueError("n must be >= 1")
    sentence = tuple(sentence)
    return [sentence[i:i + n] for i in range(len(sentence) - n + 1)]


@dataclass(frozen=True)
class NgramRecord:
    gram: tuple[str, ...]
    freq_total: int
    freq_uncovered: int

    @property
    def parsability(self) -> float:
        return (self.freq_total - self.freq_uncovered) / self.freq_total

    @property
    def text(self) -> str:
        return " ".join(self.gram)

    def sort_key(self):
        return self.parsability, -self.freq_total, self.gram


def _containing_counts(sentences: Iterable[Sequence[str]], n: int) -> Counter:
    """Number of sentences containing each n-gram (not occurrences)."""
    counts: Counter = Counter()
    for s in sentences:
        counts.update(set(extract_ngrams(s, n)))
    return counts


def mine_errors(covered: Iterable[Sequence[str]], uncovered: Iterable[Sequence[str]],
                max_n: int = 5, min_freq: int = 2, threshold: float | None = None, *,
                min_n: int = 1, subgram_filter: bool = True) -> list[NgramRecord]:
    """Rank word n-grams by how rarely the sentences containing them parse.

    The parsability of an n-gram is the share of sentences containing it
    that were covered. Above n = 1 an n-gram is kept only when its
    parsability is strictly below that of both of its (n-1)-grams. Records
    found in fewer than ``min_freq`` sentences are dropped, as are those not
    strictly below ``threshold`` when it is given. Only n-grams with
    ``min_n <= n <= max_n`` are reported; ``subgram_filter=False`` lists
    every n-gram regardless of its sub-grams. Order: parsability ascending,
    frequency descending, then the n-gram itself.
    """
    if not 1 <= min_n <= max_n:
        raise ValueError("need 1 <= min_n <= max_n")
    covered = [tuple(s) for s in covered]
    uncovered = [tuple(s) for s in uncovered]
    records = []
    prev_parsability: dict[tuple[str, ...], float] = {}
    for n in range(1, max_n + 1):
        bad = _containing_counts(uncovered, n)
        total = _containing_counts(covered, n) + bad
        parsability = {g: (c - bad[g]) / c for g, c in total.items()}
        for gram, count in total.items():
            p = parsability[gram]
            if n < min_n:
                continue
            if subgram_filter and n > 1 and not p < min(prev_parsability[gram[:-1]],
                                                        prev_parsability[gram[1:]]):
                continue
            if count < min_freq or (threshold is not None and p >= threshold):
                continue
            records.append(NgramRecord(gram, count, bad[gram]))
        prev_parsability = parsability
    records.sort(key=NgramRecord.sort_key)
    return records
