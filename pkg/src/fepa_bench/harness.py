"""Run external parser executables over a corpus.

Each sentence is handed to the adapter either as a fresh process
(``per-sentence``) or over a long-lived pipe with a sentinel line after each
sentence (``batch-stream``). Wall time is measured around the call, raw
output is saved under the run directory, and every record is appended and
fsynced to ``ledger.tsv`` so an interrupted run can pick up where it stopped.
"""
from __future__ import annotations

import configparser
import hashlib
import json
import logging
import os
import queue
import re
import shlex
import shutil
import socket
import subprocess
import tempfile
import threading
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .corpus import Source, Token, _text, read_bracketed, read_dep_tsv, read_gr
from .coverage import CoverageLedger, Verdict
from .errors import (
    AdapterNotFound,
    AllSentencesTerminated,
    EmptyCorpus,
    FepaError,
    InputError,
    JudgeConfigError,
)

log = logging.getLogger(__name__)

TEXT_FORMATS = ("raw", "pre-tagged")
INVOCATIONS = ("per-sentence", "batch-stream")
OUTPUT_FORMATS = ("bracketed", "dep-tsv", "gr", "opaque")
DEFAULT_SENTINEL = "<<<fepa-end-of-sentence>>>"
LEDGER_NAME = "ledger.tsv"
META_NAME = "meta.json"


# ---------------------------------------------------------------------------
# judges

Judge = Callable[[str], Verdict]


def _regex(params, key, default=None):
    pattern = params.get(key, default)
    if pattern is None:
        return None
    try:
        return re.compile(pattern, re.MULTILINE)
    except re.error as exc:
        raise JudgeConfigError(f"bad regular expression for {key!r}: {exc}") from None


def _single_root_ps(params, output_format):
    if output_format not in ("bracketed", "opaque"):
        raise JudgeConfigError(f"single-root-ps needs bracketed output, not {output_format}")
    labels = {x.strip() for x in params.get("labels", "S").split(",") if x.strip()}
    brackets = params.get("brackets", "()")
    any_label = "*" in labels

    def judge(text):
        try:
            trees = read_bracketed(text, brackets=brackets)
        except InputError:
            return Verdict.FAILED
        if not trees:
            return Verdict.FAILED
        if len(trees) > 1:
            return Verdict.FRAGMENTED
        tree = trees[0]
        spanning = [n for n in tree.subtrees() if n.span == tree.span and (any_label or n.label in labels)]
        return Verdict.COVERED if spanning else Verdict.FRAGMENTED

    return judge


def _edge_components(edges: list[tuple[int, int]], n: int) -> int:
    if n == 0:
        return 0
    rows = [a for a, _ in edges]
    cols = [b for _, b in edges]
    graph = coo_matrix((np.ones(len(edges)), (rows, cols)), shape=(n, n))
    return connected_components(graph, directed=False)[0]


def _connected_dep(params, output_format):
    if output_format not in ("dep-tsv", "gr"):
        raise JudgeConfigError(f"connected-dep needs dep-tsv or gr output, not {output_format}")
    from .dependency import GrHierarchy, _slots

    hierarchy = GrHierarchy.default()

    def judge(text):
        try:
            corpus = read_dep_tsv(text, permissive=True) if output_format == "dep-tsv" else read_gr(text)
        except InputError:
            return Verdict.FAILED
        if len(corpus) == 0:
            return Verdict.FAILED
        if len(corpus) > 1:
            return Verdict.FRAGMENTED
        analysis = corpus[0]
        if output_format == "dep-tsv":
            n = len(analysis)
            edges = [(d - 1, h - 1) for d, h in enumerate(analysis.heads, 1) if h > 0]
        else:
            ids: dict[str, int] = {}
            edges = []
            for rel in analysis.relations:
                slots = _slots(rel, hierarchy)
                ends = [x for x in (slots.head, slots.dep) if x not in (None, "_")]
                for x in ends:
                    ids.setdefault(x, len(ids))
                if len(ends) == 2:
                    edges.append((ids[ends[0]], ids[ends[1]]))
            n = len(ids)
        if n == 0:
            return Verdict.FAILED
        return Verdict.COVERED if _edge_components(edges, n) == 1 else Verdict.FRAGMENTED

    return judge


def _marker(params, output_format):
    failed = _regex(params, "failed")
    fragmented = _regex(params, "fragmented")
    covered = _regex(params, "covered")
    if not (failed or fragmented or covered):
        raise JudgeConfigError("marker judge needs at least one of failed, fragmented, covered")

    def judge(text):
        if failed and failed.search(text):
            return Verdict.FAILED
        if fragmented and fragmented.search(text):
            return Verdict.FRAGMENTED
        if covered:
            return Verdict.COVERED if covered.search(text) else Verdict.FAILED
        return Verdict.COVERED

    return judge


def _no_null_links(params, output_format):
    separator = _regex(params, "separator", r"^\s*Linkage \d+")
    null = _regex(params, "null", r"\[[^\[\]\s]+\]|null count=[1-9]")

    def judge(text):
        blocks = [b for b in separator.split(text) if b.strip()]
        if not blocks:
            return Verdict.FAILED
        return Verdict.FRAGMENTED if all(null.search(b) for b in blocks) else Verdict.COVERED

    return judge


def _identity(params, output_format):
    return lambda text: Verdict.COVERED


JUDGES = {
    "single-root-ps": (_single_root_ps, {"labels", "brackets"}),
    "connected-dep": (_connected_dep, set()),
    "marker": (_marker, {"failed", "fragmented", "covered"}),
    "no-null-links": (_no_null_links, {"separator", "null"}),
    "identity": (_identity, set()),
}


def make_judge(name: str, params: Mapping[str, str] | None = None, output_format: str = "opaque") -> Judge:
    """Build a verdict function from a judge name and its parameters.

    Whatever the judge, blank output is always ``failed``.
    """
    params = dict(params or {})
    if name not in JUDGES:
        raise JudgeConfigError(f"unknown judge {name!r}; choose from {sorted(JUDGES)}")
    factory, allowed = JUDGES[name]
    extra = set(params) - allowed
    if extra:
        raise JudgeConfigError(f"judge {name!r} does not take {sorted(extra)}")
    inner = factory(params, output_format)

    def judge(text: str) -> Verdict:
        if not text.strip():
            return Verdict.FAILED
        return inner(text)

    return judge


# ---------------------------------------------------------------------------
# adapters and ledgers

@dataclass(frozen=True)
class AdapterSpec:
    """How to call one external parser.

    ``command`` is split shell-style; ``{input}`` is replaced by the path of
    a file holding the sentence (otherwise the sentence goes to stdin) and
    ``{index}`` by the 1-based sentence number. ``memory_cap`` is recorded in
    the run metadata but not enforced.
    """

    name: str
    command: str
    text_format: str = "raw"
    invocation: str = "per-sentence"
    output_format: str = "opaque"
    judge: str = "identity"
    judge_params: Mapping[str, str] = field(default_factory=dict)
    timeout: float = 60.0
    memory_cap: str | None = None
    sentinel: str = DEFAULT_SENTINEL
    tag_sep: str = "/"

    def __post_init__(self):
        if self.text_format not in TEXT_FORMATS:
            raise InputError(f"text_format must be one of {TEXT_FORMATS}")
        if self.invocation not in INVOCATIONS:
            raise InputError(f"invocation must be one of {INVOCATIONS}")
        if self.output_format not in OUTPUT_FORMATS:
            raise InputError(f"output_format must be one of {OUTPUT_FORMATS}")
        if not self.timeout > 0:
            raise InputError("timeout must be positive")
        if not self.command.strip():
            raise InputError("empty command template")
        object.__setattr__(self, "judge_params", dict(self.judge_params))
        make_judge(self.judge, self.judge_params, self.output_format)

    @property
    def argv0(self) -> str:
        return shlex.split(self.command)[0]

    def argv(self, index: int, input_path: str | None = None) -> list[str]:
        return [a.replace("{input}", input_path or "").replace("{index}", str(index))
                for a in shlex.split(self.command)]

    @property
    def uses_input_file(self) -> bool:
        return "{input}" in self.command

    def render(self, sentence) -> str:
        """One line of text for the adapter."""
        if isinstance(sentence, str):
            return sentence
        words = []
        for tok in sentence:
            if isinstance(tok, Token):
                words.append(f"{tok.form}{self.tag_sep}{tok.pos}" if self.text_format == "pre-tagged" and tok.pos
                             else tok.form)
            elif isinstance(tok, tuple) and self.text_format == "pre-tagged":
                words.append(self.tag_sep.join(tok))
            else:
                words.append(str(tok))
        return " ".join(words)

    def fingerprint(self) -> dict:
        return {k: v for k, v in asdict(self).items()}


@dataclass(frozen=True)
class RunRecord:
    index: int
    verdict: Verdict
    millis: float
    exit: int | None
    output_path: str

    def to_line(self) -> str:
        code = "-" if self.exit is None else str(self.exit)
        return f"{self.index}\t{self.verdict.value}\t{self.millis:.3f}\t{code}\t{self.output_path}\n"

    @classmethod
    def from_line(cls, line: str) -> RunRecord:
        index, verdict, millis, code, path = line.rstrip("\n").split("\t")
        return cls(int(index), Verdict(verdict), float(millis), None if code == "-" else int(code), path)


@dataclass(frozen=True)
class RunLedger:
    records: tuple[RunRecord, ...]
    fingerprint: Mapping = field(default_factory=dict, compare=False)
    run_dir: Path | None = field(default=None, compare=False)

    def __len__(self):
        return len(self.records)

    @property
    def verdicts(self) -> tuple[Verdict, ...]:
        return tuple(r.verdict for r in self.records)

    def tallies(self) -> dict[Verdict, int]:
        return CoverageLedger(self.verdicts).tallies()

    def output(self, index: int) -> str:
        """Raw output of sentence ``index`` (1-based)."""
        rec = self.records[index - 1]
        return (Path(self.run_dir) / rec.output_path).read_text("utf-8")

    @classmethod
    def load(cls, run_dir) -> RunLedger:
        run_dir = Path(run_dir)
        meta = json.loads((run_dir / META_NAME).read_text("utf-8")) if (run_dir / META_NAME).exists() else {}
        return cls(tuple(_read_records(run_dir / LEDGER_NAME)), meta, run_dir)


def to_coverage_ledger(ledger: RunLedger, genres: Sequence[str | None] = ()) -> CoverageLedger:
    return CoverageLedger(ledger.verdicts, tuple(genres))


def _read_records(path: Path) -> list[RunRecord]:
    if not path.exists():
        return []
    records = []
    for line in path.read_text("utf-8").splitlines(keepends=True):
        if not line.endswith("\n"):
            break  # torn final write
        try:
            records.append(RunRecord.from_line(line))
        except ValueError:
            break
    return records


def _corpus_digest(lines: Sequence[str]) -> str:
    h = hashlib.sha256()
    for line in lines:
        h.update(line.encode("utf-8") + b"\n")
    return h.hexdigest()


class _Stream:
    """A long-lived adapter process fed one sentence at a time."""

    def __init__(self, argv: list[str], sentinel: str):
        self.sentinel = sentinel
        self.proc = subprocess.Popen(argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                     stderr=subprocess.DEVNULL, text=True, bufsize=1)
        self.lines: queue.Queue = queue.Queue()
        threading.Thread(target=self._pump, daemon=True).start()

    def _pump(self):
        for line in self.proc.stdout:
            self.lines.put(line)
        self.lines.put(None)

    def send(self, text: str, timeout: float) -> tuple[str, bool]:
        """Output up to the sentinel and whether the sentinel arrived in time."""
        try:
            self.proc.stdin.write(f"{text}\n{self.sentinel}\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError):
            return "", False
        deadline = time.monotonic() + timeout
        out = []
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return "".join(out), False
            try:
                line = self.lines.get(timeout=remaining)
            except queue.Empty:
                return "".join(out), False
            if line is None:
                return "".join(out), False
            if line.rstrip("\r\n") == self.sentinel:
                return "".join(out), True
            out.append(line)

    def close(self):
        if self.proc.poll() is None:
            try:
                self.proc.stdin.close()
            except OSError:
                pass
            try:
                self.proc.wait(timeout=1)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()
        return self.proc.returncode


def _run_one(adapter: AdapterSpec, index: int, text: str, workdir: Path) -> tuple[str, int | None, bool]:
    """(stdout, exit status or None on timeout, terminated?) for one process call."""
    input_path = None
    if adapter.uses_input_file:
        fd, input_path = tempfile.mkstemp(dir=workdir, suffix=".txt")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    try:
        proc = subprocess.run(adapter.argv(index, input_path),
                              input=None if input_path else text + "\n",
                              capture_output=True, text=True, timeout=adapter.timeout)
    except subprocess.TimeoutExpired as exc:
        out = exc.stdout or ""
        return out.decode("utf-8", "replace") if isinstance(out, bytes) else out, None, True
    finally:
        if input_path:
            os.unlink(input_path)
    return proc.stdout, proc.returncode, proc.returncode != 0


def run_corpus(corpus: Iterable, adapter: AdapterSpec, run_dir, *, max_consecutive_failures: int = 100,
               resume: bool = True) -> RunLedger:
    """Parse every sentence with ``adapter`` and return the ledger.

    A crash, nonzero exit or timeout marks the sentence ``terminated`` and
    processing continues with the next one (a batch-stream process is
    restarted). Blank output from a clean exit is ``failed``; anything else
    goes to the adapter's judge. After ``max_consecutive_failures``
    terminations in a row the run aborts with AllSentencesTerminated.
    Rerunning into the same directory skips sentences already recorded.
    """
    lines = [adapter.render(s) for s in corpus]
    if not lines:
        raise EmptyCorpus("nothing to parse")
    if shutil.which(adapter.argv0) is None:
        raise AdapterNotFound(f"adapter {adapter.name!r}: {adapter.argv0!r} is not an executable")
    judge = make_judge(adapter.judge, adapter.judge_params, adapter.output_format)

    run_dir = Path(run_dir)
    out_dir = run_dir / "outputs"
    out_dir.mkdir(parents=True, exist_ok=True)
    digest = _corpus_digest(lines)
    meta_path, ledger_path = run_dir / META_NAME, run_dir / LEDGER_NAME
    records: list[RunRecord] = []
    meta = None
    if resume and meta_path.exists():
        meta = json.loads(meta_path.read_text("utf-8"))
        if meta.get("corpus_sha256") != digest or meta.get("adapter", {}).get("command") != adapter.command:
            raise FepaError(f"{run_dir} holds a run of a different corpus or adapter")
        records = _read_records(ledger_path)
        # drop a torn tail so appends start on a clean line
        ledger_path.write_text("".join(r.to_line() for r in records), "utf-8")
        log.info("resuming %s at sentence %d", adapter.name, len(records) + 1)
    if meta is None:
        meta = {"host": socket.gethostname(), "started": datetime.now(timezone.utc).isoformat(),
                "adapter": adapter.fingerprint(), "n_sentences": len(lines), "corpus_sha256": digest}
        meta_path.write_text(json.dumps(meta, indent=2, default=str), "utf-8")
        ledger_path.write_text("", "utf-8")

    stream = None
    streak = 0
    try:
        with open(ledger_path, "a", encoding="utf-8") as ledger_fh:
            for index in range(len(records) + 1, len(lines) + 1):
                text = lines[index - 1]
                t0 = time.perf_counter()
                if adapter.invocation == "batch-stream":
                    if stream is None:
                        stream = _Stream(adapter.argv(index), adapter.sentinel)
                    output, ok = stream.send(text, adapter.timeout)
                    millis = round((time.perf_counter() - t0) * 1000, 3)
                    if ok:
                        code, terminated = 0, False
                    else:
                        stream.proc.kill()
                        code = stream.close()
                        code = None if code is None or code == -9 else code
                        stream, terminated = None, True
                else:
                    output, code, terminated = _run_one(adapter, index, text, run_dir)
                    millis = round((time.perf_counter() - t0) * 1000, 3)
                rel = f"outputs/{index:06d}.out"
                (run_dir / rel).write_text(output, "utf-8")
                verdict = Verdict.TERMINATED if terminated else judge(output)
                rec = RunRecord(index, verdict, millis, code, rel)
                ledger_fh.write(rec.to_line())
                ledger_fh.flush()
                os.fsync(ledger_fh.fileno())
                records.append(rec)
                streak = streak + 1 if terminated else 0
                if streak >= max_consecutive_failures:
                    raise AllSentencesTerminated(
                        f"adapter {adapter.name!r} terminated on {streak} consecutive sentences "
                        f"(last: {index})")
    finally:
        if stream is not None:
            stream.close()
    return RunLedger(tuple(records), meta, run_dir)


# ---------------------------------------------------------------------------
# timing

def _bucket(length: int, width: int) -> str:
    lo = (max(length, 1) - 1) // width * width + 1
    return f"{lo}-{lo + width - 1}"


def timing_stats(ledger: RunLedger | Sequence[RunRecord], *, include_terminated: bool = True,
                 lengths: Sequence[int] | None = None, bucket_width: int = 10) -> dict:
    """Total and mean wall time, percentiles and per-length buckets, in seconds.

    ``lengths`` gives the token count of each sentence in ledger order and
    enables the buckets.
    """
    records = list(getattr(ledger, "records", ledger))
    keep = [i for i, r in enumerate(records) if include_terminated or r.verdict is not Verdict.TERMINATED]
    secs = np.array([records[i].millis / 1000 for i in keep], dtype=float)
    if secs.size == 0:
        return {"n": 0, "total_s": 0.0, "mean_s": None, "p50_s": None, "p90_s": None, "p99_s": None,
                "buckets": {}}
    p50, p90, p99 = np.percentile(secs, [50, 90, 99])
    stats = {"n": int(secs.size), "total_s": float(secs.sum()), "mean_s": float(secs.mean()),
             "p50_s": float(p50), "p90_s": float(p90), "p99_s": float(p99), "buckets": {}}
    if lengths is not None:
        if len(lengths) != len(records):
            raise InputError(f"{len(lengths)} lengths for {len(records)} ledger records")
        groups: dict[str, list[float]] = {}
        for i in keep:
            groups.setdefault(_bucket(lengths[i], bucket_width), []).append(records[i].millis / 1000)
        order = sorted(groups, key=lambda k: int(k.split("-")[0]))
        stats["buckets"] = {k: {"n": len(groups[k]), "mean_s": float(np.mean(groups[k]))} for k in order}
    return stats


def read_adapter_config(stream: Source) -> dict[str, AdapterSpec]:
    """Adapter specs from an INI document, one section per adapter.

    Keys match the :class:`AdapterSpec` fields; ``judge.<param>`` keys become
    judge parameters.
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(_text(stream))
    except configparser.Error as exc:
        raise InputError(f"bad adapter config: {exc}") from None
    known = {f for f in AdapterSpec.__dataclass_fields__} - {"name", "judge_params"}
    adapters = {}
    for name in parser.sections():
        section = parser[name]
        kwargs: dict = {}
        params = {}
        for key, value in section.items():
            if key.startswith("judge."):
                params[key[len("judge."):]] = value
            elif key.replace("-", "_") in known:
                kwargs[key.replace("-", "_")] = value
            else:
                raise InputError(f"adapter {name!r}: unknown key {key!r}")
        if "command" not in kwargs:
            raise InputError(f"adapter {name!r} has no command")
        if "timeout" in kwargs:
            try:
                kwargs["timeout"] = float(kwargs["timeout"])
            except ValueError:
                raise InputError(f"adapter {name!r}: timeout must be a number") from None
        adapters[name] = AdapterSpec(name=name, judge_params=params, **kwargs)
    if not adapters:
        raise InputError("adapter config defines no adapters")
    return adapters
