"""Corpus and analysis formats.

Everything is normalised into four in-memory shapes: :class:`PhraseTree`
(bracketed constituency trees), :class:`DepGraph` (head index per token, 0 for
the root), :class:`GrSet` (grammatical-relation tuples) and
:class:`ParallelPair` (a correct sentence aligned with a misspelled copy).
Readers take either a string or a text stream; :func:`open_input` resolves a
path, with ``-`` meaning standard input.
"""
from __future__ import annotations

import io
import re
import sys
import unicodedata
import warnings
import xml.etree.ElementTree as ElementTree
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, TextIO, Union

from .errors import (
    BadColumnCount,
    CycleDetected,
    DanglingEdgeRef,
    EmptyNode,
    HeadOutOfRange,
    InputError,
    LengthMismatch,
    MalformedRelation,
    MissingAttribute,
    MixedTerminalNonterminal,
    UnbalancedBrackets,
)

#: Label given to bracket groups that carry no category name.
UNLABELED = "_"

#: Placeholder for an absent column value or an unfilled relation slot.
ABSENT = "_"

Source = Union[str, TextIO]


def open_input(path: str, encoding: str = "utf-8") -> TextIO:
    """Open ``path`` for reading; ``-`` returns standard input."""
    if path == "-":
        return sys.stdin
    return open(path, encoding=encoding)


def _text(source: Source) -> str:
    if hasattr(source, "read"):
        return source.read()
    return source


def is_punct(form: str) -> bool:
    """True when every character of ``form`` is Unicode punctuation."""
    return bool(form) and all(unicodedata.category(ch).startswith("P") for ch in form)


@dataclass(frozen=True)
class Token:
    index: int
    form: str
    lemma: str | None = None
    pos: str | None = None

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"token index must be >= 1, got {self.index}")
        if not self.form:
            raise ValueError("token form must be non-empty")


class PhraseTree:
    """A labelled, ordered tree whose leaves are :class:`Token` objects.

    ``start`` and ``end`` give the inclusive 1-based token span.
    """

    __slots__ = ("label", "children", "start", "end")

    def __init__(self, label: str, children: Sequence[PhraseTree | Token]):
        if not children:
            raise EmptyNode(f"node {label!r} has no children")
        self.label = label
        self.children = tuple(children)
        spans = [(c.index, c.index) if isinstance(c, Token) else (c.start, c.end)
                 for c in self.children]
        for (_, prev_end), (next_start, _) in zip(spans, spans[1:]):
            if next_start != prev_end + 1:
                raise ValueError(f"children of {label!r} are not contiguous")
        self.start = spans[0][0]
        self.end = spans[-1][1]

    @property
    def span(self) -> tuple[int, int]:
        return self.start, self.end

    @property
    def is_preterminal(self) -> bool:
        return len(self.children) == 1 and isinstance(self.children[0], Token)

    def leaves(self) -> list[Token]:
        out = []
        for child in self.children:
            if isinstance(child, Token):
                out.append(child)
            else:
                out.extend(child.leaves())
        return out

    def words(self) -> list[str]:
        return [t.form for t in self.leaves()]

    def subtrees(self) -> Iterator[PhraseTree]:
        """Pre-order walk over all nodes, this one included."""
        yield self
        for child in self.children:
            if isinstance(child, PhraseTree):
                yield from child.subtrees()

    def __eq__(self, other):
        if not isinstance(other, PhraseTree):
            return NotImplemented
        return self.label == other.label and self.children == other.children

    def __hash__(self):
        return hash((self.label, self.children))

    def __len__(self):
        return self.end - self.start + 1

    def __repr__(self):
        return f"PhraseTree({write_bracketed(self)!r})"


@dataclass(frozen=True)
class DepGraph:
    """Per-token head indices (0 = root) and dependency labels."""

    tokens: tuple[Token, ...]
    heads: tuple[int, ...]
    labels: tuple[str | None, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "heads", tuple(self.heads))
        labels = tuple(self.labels) if self.labels else (None,) * len(self.tokens)
        object.__setattr__(self, "labels", labels)
        if not len(self.tokens) == len(self.heads) == len(self.labels):
            raise ValueError("tokens, heads and labels must have equal length")

    @classmethod
    def from_lists(cls, forms, heads, labels=None, pos=None) -> DepGraph:
        pos = pos or [None] * len(forms)
        tokens = tuple(Token(i, f, None, p) for i, (f, p) in enumerate(zip(forms, pos), 1))
        return cls(tokens, tuple(heads), tuple(labels) if labels else ())

    def __len__(self):
        return len(self.tokens)

    @property
    def forms(self) -> tuple[str, ...]:
        return tuple(t.form for t in self.tokens)

    @property
    def roots(self) -> tuple[int, ...]:
        return tuple(i for i, h in enumerate(self.heads, 1) if h == 0)

    def find_cycle(self) -> list[int] | None:
        """Return the token indices of one cycle, or None for a forest."""
        n = len(self.heads)
        state = [0] * (n + 1)  # 0 unseen, 1 on current path, 2 done
        for start in range(1, n + 1):
            path = []
            node = start
            while node != 0 and state[node] == 0:
                state[node] = 1
                path.append(node)
                node = self.heads[node - 1]
            if node != 0 and state[node] == 1:
                return path[path.index(node):]
            for p in path:
                state[p] = 2
        return None

    @property
    def has_cycle(self) -> bool:
        return self.find_cycle() is not None


@dataclass(frozen=True)
class GrRelation:
    """One grammatical relation, e.g. ``(ncsubj playing Liverpool _)``.

    ``args`` keeps every slot in file order; which slot is the head, the
    dependent or the type is decided by the relation hierarchy at match time.
    """

    name: str
    args: tuple[str, ...]

    def __str__(self):
        return f"({self.name} {' '.join(self.args)})"


@dataclass(frozen=True)
class GrSet:
    relations: tuple[GrRelation, ...] = ()

    def __len__(self):
        return len(self.relations)

    def __iter__(self):
        return iter(self.relations)


@dataclass(frozen=True)
class ParallelPair:
    correct: tuple[str, ...]
    noisy: tuple[str, ...]
    error_level: int
    corrections: tuple[tuple[str, ...], ...] = ()


@dataclass(frozen=True)
class Corpus:
    """An immutable sequence of sentence analyses."""

    sentences: tuple = ()
    genre: str | None = None
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def __getitem__(self, i):
        return self.sentences[i]


# ---------------------------------------------------------------------------
# bracketed trees

_BRACKET_STYLES = {"()": ("(", ")"), "[]": ("[", "]")}


def _tokenize_brackets(text: str, opener: str, closer: str):
    pattern = re.compile(r"\s*(?:(%s)|(%s)|([^\s%s%s]+))" % (
        re.escape(opener), re.escape(closer), re.escape(opener), re.escape(closer)))
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = pattern.match(text, pos)
        if m is None:  # pragma: no cover - the pattern accepts any non-space char
            raise UnbalancedBrackets(f"unexpected character at offset {pos}")
        if m.group(1):
            yield "open", m.group(1), m.start(1)
        elif m.group(2):
            yield "close", m.group(2), m.start(2)
        else:
            yield "atom", m.group(3), m.start(3)
        pos = m.end()


def read_bracketed(stream: Source, *, allow_unlabeled: bool = False, strict: bool = False,
                   brackets: str = "()") -> Corpus:
    """Read bracketed trees, one per top-level balanced group.

    In the default labelled mode the first atom of each group is the node
    label and the remaining atoms are terminals. With ``allow_unlabeled``
    groups carry no labels (every atom is a terminal) and each node is given
    the label :data:`UNLABELED`. ``brackets`` selects ``"()"`` or ``"[]"``.
    A labelled-mode outer wrapper ``( (S ...) )`` is unwrapped.
    """
    opener, closer = _BRACKET_STYLES[brackets]
    text = _text(stream)
    trees = []
    # stack entries: [label, children, offset]
    stack: list[list] = []
    index = 0
    for kind, value, offset in _tokenize_brackets(text, opener, closer):
        if kind == "open":
            stack.append([None, [], offset])
        elif kind == "atom":
            if not stack:
                raise UnbalancedBrackets(f"terminal {value!r} outside brackets at offset {offset}")
            frame = stack[-1]
            if not allow_unlabeled and frame[0] is None and not frame[1]:
                frame[0] = value
            else:
                index += 1
                frame[1].append(Token(index, value))
        else:
            if not stack:
                raise UnbalancedBrackets(f"unmatched {closer!r} at offset {offset}")
            label, children, start = stack.pop()
            if allow_unlabeled:
                label = UNLABELED
            if not children:
                raise EmptyNode(f"empty node {label!r} at offset {start}")
            if label is None:
                if not stack and len(children) == 1 and isinstance(children[0], PhraseTree):
                    node = children[0]
                else:
                    raise EmptyNode(f"group without a label at offset {start}")
            else:
                if strict:
                    kinds = {isinstance(c, Token) for c in children}
                    if len(kinds) > 1:
                        raise MixedTerminalNonterminal(
                            f"node {label!r} mixes terminals and subtrees at offset {start}")
                node = PhraseTree(label, children)
            if stack:
                stack[-1][1].append(node)
            else:
                trees.append(node)
                index = 0
    if stack:
        raise UnbalancedBrackets(f"unclosed {opener!r} at offset {stack[-1][2]}")
    return Corpus(trees, metadata={"format": "bracketed"})


def write_bracketed(tree: PhraseTree | Iterable[PhraseTree], brackets: str = "()") -> str:
    """Serialise one tree (no trailing newline) or a corpus (one tree per line)."""
    opener, closer = _BRACKET_STYLES[brackets]

    def render(node):
        parts = [] if node.label == UNLABELED else [node.label]
        for child in node.children:
            parts.append(child.form if isinstance(child, Token) else render(child))
        return opener + " ".join(parts) + closer

    if isinstance(tree, PhraseTree):
        return render(tree)
    return "".join(render(t) + "\n" for t in tree)


# ---------------------------------------------------------------------------
# dependency TSV

def _check_graph(graph: DepGraph, sentence: int, permissive: bool):
    if graph.find_cycle() is not None and not permissive:
        raise CycleDetected(f"dependency cycle through tokens {graph.find_cycle()}",
                            sentence=sentence)


def read_dep_tsv(stream: Source, *, permissive: bool = False) -> Corpus:
    """Read tab-separated dependency blocks.

    Columns are ``INDEX FORM LEMMA POS HEAD DEPREL`` with ``_`` for absent
    values. Ten-column CoNLL-X/CoNLL-U lines are also accepted (POS is taken
    from the fourth column, HEAD and DEPREL from the seventh and eighth);
    multiword-token and empty-node lines are skipped.
    """
    graphs = []
    block: list[tuple[int, list[str]]] = []

    def flush():
        if not block:
            return
        n = len(block)
        tokens, heads, labels = [], [], []
        for expected, (lineno, cols) in enumerate(block, 1):
            try:
                idx = int(cols[0])
            except ValueError:
                raise InputError(f"bad token index {cols[0]!r}", line=lineno) from None
            if idx != expected:
                raise InputError(f"token index {idx} out of sequence", line=lineno)
            if len(cols) == 6:
                form, lemma, pos, head, rel = cols[1], cols[2], cols[3], cols[4], cols[5]
            else:
                form, lemma, pos, head, rel = cols[1], cols[2], cols[3], cols[6], cols[7]
            try:
                head_i = int(head)
            except ValueError:
                raise InputError(f"bad head {head!r}", line=lineno) from None
            if not 0 <= head_i <= n:
                raise HeadOutOfRange(f"head {head_i} outside 0..{n}", line=lineno)
            tokens.append(Token(idx, form, None if lemma == ABSENT else lemma,
                                None if pos == ABSENT else pos))
            heads.append(head_i)
            labels.append(None if rel == ABSENT else rel)
        graph = DepGraph(tuple(tokens), tuple(heads), tuple(labels))
        _check_graph(graph, len(graphs) + 1, permissive)
        graphs.append(graph)
        block.clear()

    for lineno, line in enumerate(io.StringIO(_text(stream)), 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            continue
        cols = line.rstrip().split("\t")
        if len(cols) not in (6, 10):
            raise BadColumnCount(f"expected 6 or 10 columns, got {len(cols)}", line=lineno)
        if "-" in cols[0] or "." in cols[0]:
            continue
        block.append((lineno, cols))
    flush()
    return Corpus(graphs, metadata={"format": "dep-tsv"})


def write_dep_tsv(graphs: DepGraph | Iterable[DepGraph]) -> str:
    if isinstance(graphs, DepGraph):
        graphs = [graphs]
    out = []
    for graph in graphs:
        for tok, head, rel in zip(graph.tokens, graph.heads, graph.labels):
            cols = [str(tok.index), tok.form, tok.lemma or ABSENT, tok.pos or ABSENT,
                    str(head), rel or ABSENT]
            out.append("\t".join(cols) + "\n")
        out.append("\n")
    return "".join(out)


# ---------------------------------------------------------------------------
# grammatical relations

_RELATION = re.compile(r"^\(\s*(\S+)((?:\s+[^\s()]+){2,})\s*\)$")


def read_gr(stream: Source) -> Corpus:
    """Read GR blocks: one ``(name arg1 arg2 [args...])`` per line.

    Blocks are separated by a blank line; each extra blank line between
    blocks stands for a sentence with no relations.
    """
    lines = list(enumerate(_text(stream).split("\n"), 1))
    while lines and not lines[0][1].strip():
        lines.pop(0)
    while lines and not lines[-1][1].strip():
        lines.pop()
    if not lines:
        return Corpus((), metadata={"format": "gr"})
    sets = []
    relations: list[GrRelation] = []
    blank_run = 0
    for lineno, line in lines:
        line = line.strip()
        if not line:
            blank_run += 1
            if blank_run == 1:
                sets.append(GrSet(tuple(relations)))
                relations = []
            else:
                sets.append(GrSet())
            continue
        blank_run = 0
        if line.startswith("#"):
            continue
        m = _RELATION.match(line)
        if m is None:
            raise MalformedRelation(f"cannot parse relation {line!r}", line=lineno)
        relations.append(GrRelation(m.group(1), tuple(m.group(2).split())))
    sets.append(GrSet(tuple(relations)))
    return Corpus(sets, metadata={"format": "gr"})


def write_gr(sets: GrSet | Iterable[GrSet]) -> str:
    if isinstance(sets, GrSet):
        sets = [sets]
    blocks = ["\n".join(str(r) for r in s.relations) for s in sets]
    return "\n\n".join(blocks) + "\n" if blocks else ""


# ---------------------------------------------------------------------------
# TIGER-XML (dependency mode)

def read_tiger_xml(stream: Source, *, permissive: bool = False) -> Corpus:
    """Read dependency graphs from TIGER-XML.

    Terminals ``<t id=.. word=.. pos=..>`` are tokens in document order. An
    ``<edge label=.. idref=..>`` nested inside a terminal links that terminal
    (the head) to the referenced terminal (the dependent), mirroring the
    parent-to-child direction of TIGER edges. Terminals without an incoming
    edge are roots.
    """
    root = ElementTree.fromstring(_text(stream))
    graphs = []
    for s_no, sent in enumerate(root.iter("s"), 1):
        terminals = list(sent.iter("t"))
        if not terminals:
            warnings.warn(f"sentence {sent.get('id', s_no)} has no terminals", stacklevel=2)
            graphs.append(DepGraph((), ()))
            continue
        ids = {}
        tokens = []
        for i, t in enumerate(terminals, 1):
            tid, word = t.get("id"), t.get("word")
            if tid is None or word is None:
                missing = "id" if tid is None else "word"
                raise MissingAttribute(f"<t> without {missing!r} attribute", sentence=s_no)
            ids[tid] = i
            tokens.append(Token(i, word, t.get("lemma"), t.get("pos")))
        heads = [0] * len(tokens)
        labels: list[str | None] = [None] * len(tokens)
        for t in terminals:
            for edge in t.iter("edge"):
                ref = edge.get("idref")
                if ref is None:
                    raise MissingAttribute("<edge> without 'idref' attribute", sentence=s_no)
                if ref not in ids:
                    raise DanglingEdgeRef(f"edge refers to undeclared id {ref!r}", sentence=s_no)
                dep = ids[ref]
                if heads[dep - 1] != 0:
                    raise InputError(f"terminal {ref!r} has more than one head", sentence=s_no)
                heads[dep - 1] = ids[t.get("id")]
                labels[dep - 1] = edge.get("label")
        graph = DepGraph(tuple(tokens), tuple(heads), tuple(labels))
        _check_graph(graph, s_no, permissive)
        graphs.append(graph)
    return Corpus(graphs, metadata={"format": "tiger"})


# ---------------------------------------------------------------------------
# parallel correct / noisy text

def _lines(text: str) -> list[str]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [line.rstrip("\r") for line in lines]


def read_parallel(correct_stream: Source, noisy_stream: Source) -> list[ParallelPair]:
    """Pair line-aligned correct and noisy sentences.

    Tokens are whitespace-separated; the error level of a pair is the number
    of token positions whose forms differ.
    """
    correct, noisy = _lines(_text(correct_stream)), _lines(_text(noisy_stream))
    if len(correct) != len(noisy):
        raise LengthMismatch(
            f"{len(correct)} correct sentences vs {len(noisy)} noisy sentences",
            sentence=min(len(correct), len(noisy)) + 1)
    pairs = []
    for i, (c_line, n_line) in enumerate(zip(correct, noisy), 1):
        c_toks, n_toks = tuple(c_line.split()), tuple(n_line.split())
        if len(c_toks) != len(n_toks):
            raise LengthMismatch(f"{len(c_toks)} vs {len(n_toks)} tokens", sentence=i)
        level = sum(a != b for a, b in zip(c_toks, n_toks))
        pairs.append(ParallelPair(c_toks, n_toks, level))
    return pairs


def write_parallel(pairs: Iterable[ParallelPair]) -> tuple[str, str]:
    """Return the (correct, noisy) texts in the :func:`read_parallel` format."""
    correct, noisy = [], []
    for pair in pairs:
        correct.append(" ".join(pair.correct) + "\n")
        noisy.append(" ".join(pair.noisy) + "\n")
    return "".join(correct), "".join(noisy)
