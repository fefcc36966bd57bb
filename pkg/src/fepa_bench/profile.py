"""Subtlety scores, combined preciseness, per-criterion ranks and weighted comparison."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from scipy.stats import rankdata

from .corpus import DepGraph, GrSet, PhraseTree, Source, _text
from .errors import AllZeroWeights, InputError, TooFewProfiles

CRITERIA = ("preciseness", "coverage", "robustness", "efficiency", "subtlety")
HIGHER_BETTER = {"preciseness": True, "coverage": True, "robustness": True, "efficiency": False,
                 "subtlety": True}


def _level_score(size: int) -> float:
    if size < 0:
        raise ValueError("tagset size must be >= 0")
    return math.log10(size) if size > 0 else 0.0


def detail_score(pos_size: int, syntax_size: int) -> float:
    """Detail of an output scheme; the syntactic level weighs twice the word level."""
    return _level_score(pos_size) / 2 + _level_score(syntax_size)


def combined_preciseness(f_score: float, detail: float, ambiguity: float = 1.0,
                         underspec_rate: float = 0.0) -> float:
    """F-score scaled up by detail and down by residual ambiguity and underspecification."""
    if f_score < 0:
        raise ValueError("f_score must be >= 0")
    if ambiguity < 1:
        raise ValueError("ambiguity must be >= 1")
    if underspec_rate < 0:
        raise ValueError("underspec_rate must be >= 0")
    return f_score * detail / (ambiguity * (1 + underspec_rate))


def _marked(analysis, markers: frozenset) -> int:
    if isinstance(analysis, PhraseTree):
        return (sum(n.label in markers for n in analysis.subtrees())
                + sum(t.pos in markers for t in analysis.leaves()))
    if isinstance(analysis, DepGraph):
        return sum(t.pos in markers or lab in markers for t, lab in zip(analysis.tokens, analysis.labels))
    if isinstance(analysis, GrSet):
        return sum(r.name in markers or any(a in markers for a in r.args) for r in analysis.relations)
    return sum(tag in markers for tag in analysis)  # a plain tag sequence


def measure_output_subtlety(outputs: Iterable[Sequence], markers: Iterable[str] = ()) -> dict:
    """Underspecification rate and ambiguity over covered sentences.

    ``outputs`` has one entry per sentence, each a list of alternative
    analyses (best first). Sentences with no analysis are not covered and are
    skipped. Underspecification counts marked items in the first analysis.
    """
    markers = frozenset(markers)
    n = marked = alternatives = 0
    for analyses in outputs:
        analyses = list(analyses)
        if not analyses:
            continue
        n += 1
        alternatives += len(analyses)
        marked += _marked(analyses[0], markers) if markers else 0
    if n == 0:
        return {"underspec_rate": 0.0, "ambiguity": 1.0, "n_sentences": 0}
    return {"underspec_rate": marked / n, "ambiguity": alternatives / n, "n_sentences": n}


@dataclass(frozen=True)
class SubtletyProfile:
    pos_tagset_size: int
    syntax_tagset_size: int
    underspec_rate: float = 0.0
    ambiguity: float = 1.0

    def __post_init__(self):
        if self.pos_tagset_size < 0 or self.syntax_tagset_size < 0:
            raise InputError("tagset sizes must be >= 0")
        if self.underspec_rate < 0:
            raise InputError("underspec_rate must be >= 0")

    @property
    def detail_score(self) -> float:
        return detail_score(self.pos_tagset_size, self.syntax_tagset_size)

    @property
    def au_factor(self) -> float:
        """Ambiguity times the underspecification factor; lower is better."""
        return self.ambiguity * (1 + self.underspec_rate)


@dataclass(frozen=True)
class ParserProfile:
    """Raw per-criterion scores of one parser.

    ``robustness`` is either a single higher-is-better score or a mapping
    with ``noisy`` (higher better), ``degradation`` and ``stability``
    (terminated percentage), both lower better. ``ranks`` may carry
    precomputed criterion ranks, which then take precedence.
    """

    name: str
    preciseness: float | None = None
    coverage: float | None = None
    robustness: float | Mapping[str, float] | None = None
    efficiency: float | None = None
    subtlety: SubtletyProfile | None = None
    ranks: Mapping[str, float] = field(default_factory=dict)

    @property
    def combined_preciseness(self) -> float | None:
        if self.preciseness is None:
            return None
        if self.subtlety is None:
            return self.preciseness
        s = self.subtlety
        return combined_preciseness(self.preciseness, s.detail_score, s.ambiguity, s.underspec_rate)

    def to_dict(self) -> dict:
        out = {"name": self.name}
        for key in ("preciseness", "coverage", "robustness", "efficiency"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        if self.subtlety is not None:
            s = self.subtlety
            out["subtlety"] = {"pos_tagset_size": s.pos_tagset_size,
                               "syntax_tagset_size": s.syntax_tagset_size,
                               "underspec_rate": s.underspec_rate, "ambiguity": s.ambiguity,
                               "detail_score": s.detail_score}
        if self.ranks:
            out["ranks"] = dict(self.ranks)
        return out


def profile_from_dict(data: Mapping) -> ParserProfile:
    if "name" not in data:
        raise InputError("profile has no name")
    unknown = set(data) - {"name", "ranks", *CRITERIA}
    if unknown:
        raise InputError(f"unknown profile keys {sorted(unknown)}")
    subtlety = data.get("subtlety")
    if isinstance(subtlety, Mapping):
        subtlety = SubtletyProfile(int(subtlety.get("pos_tagset_size", 0)),
                                   int(subtlety.get("syntax_tagset_size", 0)),
                                   float(subtlety.get("underspec_rate", 0.0)),
                                   float(subtlety.get("ambiguity", 1.0)))
    elif subtlety is not None:
        raise InputError("subtlety must be an object with tagset sizes")
    ranks = data.get("ranks", {})
    bad = set(ranks) - set(CRITERIA)
    if bad:
        raise InputError(f"unknown criteria in ranks: {sorted(bad)}")
    return ParserProfile(data["name"], data.get("preciseness"), data.get("coverage"),
                         data.get("robustness"), data.get("efficiency"), subtlety, dict(ranks))


def load_profile(stream: Source) -> ParserProfile:
    try:
        data = json.loads(_text(stream))
    except json.JSONDecodeError as exc:
        raise InputError(f"profile is not valid JSON: {exc.msg}", line=exc.lineno) from None
    return profile_from_dict(data)


# ---------------------------------------------------------------------------
# ranking

def _close(a: float, b: float, rel: float, abs_: float) -> bool:
    return abs(a - b) <= max(abs_, rel * max(abs(a), abs(b)))


def rank_values(values: Sequence[float], *, higher_better: bool = True, method: str = "min",
                tie_tol: float = 0.0, tie_abs: float = 0.0) -> list[int]:
    """Rank scores, 1 = best.

    ``method`` is ``"min"`` (competition: 1, 2, 2, 4) or ``"dense"``
    (1, 2, 2, 3). Neighbouring sorted values within ``tie_tol`` (relative)
    or ``tie_abs`` (absolute) of each other share a rank.
    """
    if method not in ("min", "dense"):
        raise ValueError("method must be 'min' or 'dense'")
    if not values:
        return []
    sign = -1 if higher_better else 1
    order = sorted(range(len(values)), key=lambda i: sign * values[i])
    group = [0] * len(values)
    g = 0
    for prev, cur in zip(order, order[1:]):
        if not _close(values[prev], values[cur], tie_tol, tie_abs):
            g += 1
        group[cur] = g
    group[order[0]] = 0
    return [int(r) for r in rankdata(group, method=method)]


def _rank_keys(keys: Sequence[tuple], method: str) -> list[int]:
    distinct = sorted(set(keys))
    return [int(r) for r in rankdata([distinct.index(k) for k in keys], method=method)]


def composite_rank(sub_ranks: Sequence[Sequence[float]], *, method: str = "min",
                   tiebreak: Sequence[float] | None = None) -> list[int]:
    """Rank items by the mean of their sub-ranks (lower mean first).

    ``tiebreak`` holds one extra rank per item used only to order equal means.
    """
    means = [round(sum(r) / len(r), 9) for r in sub_ranks]
    keys = [(m, tiebreak[i]) if tiebreak is not None else (m,) for i, m in enumerate(means)]
    return _rank_keys(keys, method)


@dataclass(frozen=True)
class RankTable:
    names: tuple[str, ...]
    ranks: Mapping[str, tuple[int, ...]]          # criterion -> rank per parser
    sub_ranks: Mapping[str, Mapping[str, tuple[int, ...]]] = field(default_factory=dict)

    @property
    def criteria(self) -> tuple[str, ...]:
        return tuple(c for c in CRITERIA if c in self.ranks)

    def row(self, name: str) -> dict[str, int]:
        i = self.names.index(name)
        return {c: self.ranks[c][i] for c in self.criteria}

    def as_dict(self) -> dict:
        return {"criteria": list(self.criteria),
                "ranks": {n: self.row(n) for n in self.names},
                "sub_ranks": {c: {k: list(v) for k, v in sub.items()} for c, sub in self.sub_ranks.items()}}


def rank_criteria(profiles: Sequence[ParserProfile], *, method: str = "min",
                  tie_tol: Mapping[str, float] | None = None,
                  tie_abs: Mapping[str, float] | None = None,
                  combine_preciseness: bool = True) -> RankTable:
    """Rank every criterion that all profiles provide.

    Preciseness uses the combined score when subtlety data is present and
    ``combine_preciseness`` is set. A robustness mapping is ranked as the
    mean of its noisy-input, degradation and stability sub-ranks, stability
    breaking ties. Subtlety is the mean of the detail rank and the
    ambiguity/underspecification rank. Tolerances are keyed by criterion or
    sub-measure name (``noisy``, ``degradation``, ``stability``, ``detail``,
    ``au``).
    """
    if len(profiles) < 2:
        raise TooFewProfiles(f"need at least 2 profiles, got {len(profiles)}")
    names = tuple(p.name for p in profiles)
    if len(set(names)) != len(names):
        raise InputError("profile names must be unique")
    tie_tol, tie_abs = dict(tie_tol or {}), dict(tie_abs or {})

    def rank(key, values, higher):
        return tuple(rank_values(values, higher_better=higher, method=method,
                                 tie_tol=tie_tol.get(key, 0.0), tie_abs=tie_abs.get(key, 0.0)))

    ranks: dict[str, tuple[int, ...]] = {}
    subs: dict[str, dict[str, tuple[int, ...]]] = {}
    for crit in CRITERIA:
        if all(crit in p.ranks for p in profiles):
            ranks[crit] = tuple(int(p.ranks[crit]) for p in profiles)
            continue
        if crit == "subtlety":
            if any(p.subtlety is None for p in profiles):
                continue
            detail = rank("detail", [p.subtlety.detail_score for p in profiles], True)
            au = rank("au", [p.subtlety.au_factor for p in profiles], False)
            subs[crit] = {"detail": detail, "au": au}
            ranks[crit] = tuple(composite_rank(list(zip(detail, au)), method=method))
            continue
        raw = [getattr(p, crit) for p in profiles]
        if any(v is None for v in raw):
            continue
        if crit == "preciseness" and combine_preciseness:
            raw = [p.combined_preciseness for p in profiles]
        if crit == "robustness" and all(isinstance(v, Mapping) for v in raw):
            try:
                noisy = rank("noisy", [v["noisy"] for v in raw], True)
                degr = rank("degradation", [v["degradation"] for v in raw], False)
                stab = rank("stability", [v["stability"] for v in raw], False)
            except KeyError as exc:
                raise InputError(f"robustness entry lacks {exc.args[0]!r}") from None
            subs[crit] = {"noisy": noisy, "degradation": degr, "stability": stab}
            ranks[crit] = tuple(composite_rank(list(zip(noisy, degr, stab)), method=method, tiebreak=stab))
            continue
        if any(isinstance(v, Mapping) for v in raw):
            raise InputError(f"{crit} must be a number in every profile")
        ranks[crit] = rank(crit, [float(v) for v in raw], HIGHER_BETTER[crit])
    return RankTable(names, ranks, subs)


@dataclass(frozen=True)
class Standing:
    name: str
    score: float
    position: int
    tied: bool


def weighted_compare(table: RankTable, weights: Mapping[str, float] | None = None,
                     tiebreak: Sequence[str] = (), *, method: str = "min") -> list[Standing]:
    """Order parsers by the weighted mean of their criterion ranks.

    Missing weights default to 1. Equal scores are reported as ties unless
    the ``tiebreak`` criteria (their ranks, in order) separate them.
    """
    weights = {c: 1.0 for c in table.criteria} | dict(weights or {})
    unknown = set(weights) - set(CRITERIA)
    if unknown:
        raise InputError(f"unknown criteria {sorted(unknown)}")
    if any(w < 0 for w in weights.values()):
        raise InputError("weights must be >= 0")
    used = [c for c in table.criteria if weights.get(c, 0) > 0]
    total = sum(weights[c] for c in used)
    if total == 0:
        raise AllZeroWeights("at least one criterion needs a positive weight")
    for c in tiebreak:
        if c not in table.ranks:
            raise InputError(f"tie-break criterion {c!r} has no ranks")
    scores = [sum(weights[c] * table.ranks[c][i] for c in used) / total for i in range(len(table.names))]
    keys = [(round(s, 9), *(table.ranks[c][i] for c in tiebreak)) for i, s in enumerate(scores)]
    positions = _rank_keys(keys, method)
    counts = {k: keys.count(k) for k in keys}
    order = sorted(range(len(keys)), key=lambda i: (keys[i], table.names[i]))
    return [Standing(table.names[i], scores[i], positions[i], counts[keys[i]] > 1) for i in order]
