"""Command line front end.

Exit codes: 0 success, 1 internal error, 2 input or format error,
3 adapter failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import NamedTuple

from . import constituency as con
from . import dependency as dep
from .corpus import (
    Corpus,
    open_input,
    read_bracketed,
    read_dep_tsv,
    read_gr,
    read_parallel,
    read_tiger_xml,
    write_bracketed,
    write_dep_tsv,
    write_gr,
    write_parallel,
)
from .coverage import Verdict, generalizability, genre_coverage, mine_errors, read_verdicts
from .errors import FepaError, FormatMismatch, InputError, LengthMismatch
from .harness import RunLedger, read_adapter_config, run_corpus, timing_stats, to_coverage_ledger
from .profile import (
    SubtletyProfile,
    combined_preciseness,
    load_profile,
    measure_output_subtlety,
    rank_criteria,
    weighted_compare,
)
from .robustness import (
    NoiseSpec,
    degradation,
    generate_parallel,
    read_keyboard,
    robustness_scores,
    stability,
)

log = logging.getLogger("fepa_bench")

FORMATS = ("bracketed", "dep-tsv", "gr", "tiger")
EXTENSIONS = {".mrg": "bracketed", ".tree": "bracketed", ".trees": "bracketed", ".ptb": "bracketed",
              ".brk": "bracketed", ".conll": "dep-tsv", ".conllu": "dep-tsv", ".tsv": "dep-tsv",
              ".dep": "dep-tsv", ".gr": "gr", ".xml": "tiger"}
PS_METRICS = ("parseval", "labeled-parseval", "la")
DEP_METRICS = ("deps", "lin", "labeled-lin")
GR_METRICS = ("gr",)
FAILED_MARK = "FAILED"


# ---------------------------------------------------------------------------
# reports

class Ratio(NamedTuple):
    num: int
    den: int

    @property
    def value(self) -> float:
        return self.num / self.den if self.den else 0.0


def _jsonable(v):
    if isinstance(v, Ratio):
        return {"value": v.value, "count": f"{v.num}/{v.den}", "percent": round(100 * v.value, 1)}
    if isinstance(v, Fraction):
        return _jsonable(Ratio(v.numerator, v.denominator))
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "value") and isinstance(getattr(v, "value"), str):  # enums
        return v.value
    return v


def _cell(v) -> str:
    if isinstance(v, Ratio):
        return f"{v.num}/{v.den} ({100 * v.value:.1f}%)"
    if isinstance(v, bool) or v is None:
        return "-" if v is None else str(v).lower()
    if isinstance(v, float):
        return f"{v:.4f}"
    if isinstance(v, (list, tuple)):
        return " ".join(map(str, v))
    if isinstance(v, dict):
        return json.dumps(_jsonable(v), sort_keys=True)
    return str(getattr(v, "value", v))


def render(report: dict, style: str) -> str:
    """``report`` has a ``summary`` mapping and optional ``tables`` of row dicts."""
    summary = report.get("summary", {})
    tables = report.get("tables", {})
    if style == "json":
        return json.dumps(_jsonable(report), indent=2, ensure_ascii=False) + "\n"
    buf = io.StringIO()
    if style == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["metric", "value", "count", "percent"])
        for k, v in summary.items():
            if isinstance(v, Ratio):
                w.writerow([k, f"{v.value:.4f}", f"{v.num}/{v.den}", f"{100 * v.value:.1f}"])
            else:
                w.writerow([k, _cell(v), "", ""])
        for name, rows in tables.items():
            if not rows:
                continue
            buf.write(f"\n# {name}\n")
            w.writerow(list(rows[0]))
            for row in rows:
                w.writerow([_cell(x) for x in row.values()])
        return buf.getvalue()
    if report.get("title"):
        buf.write(report["title"] + "\n")
    width = max((len(k) for k in summary), default=0)
    for k, v in summary.items():
        buf.write(f"{k.ljust(width)}  {_cell(v)}\n")
    for name, rows in tables.items():
        if not rows:
            continue
        header = list(rows[0])
        cells = [[_cell(x) for x in row.values()] for row in rows]
        widths = [max(len(h), *(len(c[i]) for c in cells)) for i, h in enumerate(header)]
        buf.write(f"\n{name}\n")
        buf.write("  ".join(h.ljust(wd) for h, wd in zip(header, widths)).rstrip() + "\n")
        for c in cells:
            buf.write("  ".join(x.ljust(wd) for x, wd in zip(c, widths)).rstrip() + "\n")
    return buf.getvalue()


def _emit(args, report: dict):
    text = render(report, args.report)
    if args.out and args.out != "-":
        Path(args.out).write_text(text, "utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# input helpers

def _check_paths(*paths):
    for p in paths:
        if p is not None and p != "-" and not Path(p).exists():
            raise InputError(f"no such file: {p}")


def _guess_format(path: str, explicit: str | None, fallback: str) -> str:
    if explicit:
        return explicit
    return EXTENSIONS.get(Path(path).suffix.lower(), fallback)


def _read(path: str, fmt: str, args) -> Corpus:
    with open_input(path) as fh:
        text = fh.read()
    try:
        if fmt == "bracketed":
            return read_bracketed(text, allow_unlabeled=getattr(args, "unlabeled", False),
                                  brackets=getattr(args, "brackets", "()"))
        if fmt == "dep-tsv":
            return read_dep_tsv(text, permissive=args.permissive)
        if fmt == "gr":
            return read_gr(text)
        if fmt == "tiger":
            return read_tiger_xml(text, permissive=args.permissive)
    except InputError as exc:
        raise type(exc)(f"{path}: {exc}") from None
    raise FormatMismatch(f"unknown format {fmt!r}")


def _aligned(gold: Corpus, test: Corpus, gold_path: str, test_path: str):
    if len(gold) != len(test):
        raise LengthMismatch(f"{gold_path} has {len(gold)} sentences, {test_path} has {len(test)}")
    return list(zip(gold, test))


def _sentences(path: str) -> list[list[str]]:
    with open_input(path) as fh:
        return [line.split() for line in fh if line.strip()]


# ---------------------------------------------------------------------------
# eval

def cmd_eval(args) -> dict:
    _check_paths(args.gold, args.test, args.costs, args.hierarchy)
    metric = args.metric
    fallback = "bracketed" if metric in PS_METRICS else "gr" if metric in GR_METRICS else "dep-tsv"
    fmts = {_guess_format(p, args.format, fallback) for p in (args.gold, args.test)}
    if len(fmts) > 1:
        raise FormatMismatch(f"gold and test formats differ: {sorted(fmts)}")
    fmt = fmts.pop()
    wanted = ("bracketed",) if metric in PS_METRICS else ("gr",) if metric in GR_METRICS else ("dep-tsv", "tiger")
    if fmt not in wanted:
        raise FormatMismatch(f"metric {metric!r} needs {' or '.join(wanted)} input, got {fmt}")
    gold, test = _read(args.gold, fmt, args), _read(args.test, fmt, args)
    pairs = _aligned(gold, test, args.gold, args.test)
    rows = []
    summary: dict = {"metric": metric, "sentences": len(pairs)}

    if metric in ("parseval", "labeled-parseval"):
        labeled = metric == "labeled-parseval"
        opts = dict(preterminals=not args.drop_preterminals, width1=not args.drop_width1,
                    root=not args.drop_root)
        total = con.ParsevalScore(0, 0, 0)
        crossing = 0
        for i, (g, t) in enumerate(pairs, 1):
            gs, ts = con.SpanSet.from_tree(g, **opts), con.SpanSet.from_tree(t, **opts)
            try:
                s = con.parseval(gs, ts, labeled)
                c = con.crossing_brackets(gs, ts)
            except InputError as exc:
                raise type(exc)(exc.message, sentence=i) from None
            total, crossing = total + s, crossing + c
            rows.append({"sentence": i, "matched": s.n_matched, "gold": s.n_gold, "test": s.n_test,
                         "precision": s.precision, "recall": s.recall, "f_score": s.f_score, "crossing": c})
        summary |= {"precision": Ratio(total.n_matched, total.n_test),
                    "recall": Ratio(total.n_matched, total.n_gold), "f_score": total.f_score,
                    "crossing_brackets": crossing,
                    "crossing_per_sentence": crossing / len(pairs) if pairs else 0.0}
    elif metric == "la":
        costs = con.read_cost_table(Path(args.costs).read_text("utf-8")) if args.costs else None
        words, exact = [], 0
        for i, (g, t) in enumerate(pairs, 1):
            try:
                s = con.la_score(g, t, costs)
            except InputError as exc:
                raise type(exc)(exc.message, sentence=i) from None
            words.extend(s.per_word)
            exact += s.exact_match
            rows.append({"sentence": i, "la": s.sentence, "exact": s.exact_match,
                         "per_word": " ".join(f"{x:.4f}" for x in s.per_word)})
        summary |= {"la_word_mean": sum(words) / len(words) if words else 0.0,
                    "la_sentence_mean": sum(r["la"] for r in rows) / len(rows) if rows else 0.0,
                    "exact_match": Ratio(exact, len(rows))}
    elif metric == "deps":
        card = dep.DepScorecard()
        for i, (g, t) in enumerate(pairs, 1):
            try:
                s = dep.dep_scores(g, t, ignore_punct=args.ignore_punct)
            except InputError as exc:
                raise type(exc)(exc.message, sentence=i) from None
            card = card + s
            rows.append({"sentence": i, **{k: Ratio(n, d) for k, (n, d) in s._raw().items() if k != "ra"
                                           and k != "labeled_cm"}})
        summary |= {k: Ratio(n, d) for k, (n, d) in card._raw().items()}
    elif metric in ("lin", "labeled-lin"):
        total = None
        for i, (g, t) in enumerate(pairs, 1):
            try:
                r = dep.lin_classify(g, t, labeled=metric == "labeled-lin")
            except InputError as exc:
                raise type(exc)(exc.message, sentence=i) from None
            total = r if total is None else total + r
            tally = r.tally()
            rows.append({"sentence": i, **{c: tally[c] for c in
                                          (dep.CORRECT, dep.INCORRECT, dep.MISSING, dep.SPURIOUS)},
                         "categories": " ".join(r.categories)})
        if total is not None:
            summary |= {"precision": Ratio(total.n_correct_links, total.n_test_links),
                        "recall": Ratio(total.n_correct_links, total.n_gold_links)}
    else:  # gr
        hierarchy = (dep.read_hierarchy(Path(args.hierarchy).read_text("utf-8")) if args.hierarchy
                     else dep.GrHierarchy.default())
        total = dep.GrResult(0, 0, 0)
        for i, (g, t) in enumerate(pairs, 1):
            try:
                r = dep.gr_match(g, t, hierarchy, strict=args.strict)
            except InputError as exc:
                raise type(exc)(exc.message, sentence=i) from None
            total = total + r
            rows.append({"sentence": i, "matched": r.n_matched, "gold": r.n_gold, "test": r.n_test,
                         "precision": r.precision, "recall": r.recall})
        summary |= {"precision": Ratio(total.n_matched, total.n_test),
                    "recall": Ratio(total.n_matched, total.n_gold), "f_score": total.f_score}
        per_rel = [{"relation": k, **v} for k, v in total.per_relation().items()]
        return {"title": f"eval {metric}", "summary": summary,
                "tables": {"sentences": rows, "relations": per_rel}}
    return {"title": f"eval {metric}", "summary": summary, "tables": {"sentences": rows}}


# ---------------------------------------------------------------------------
# mine

def cmd_mine(args) -> dict:
    _check_paths(args.verdicts)
    with open_input(args.verdicts) as fh:
        ledger, sentences = read_verdicts(fh)
    covered = [s for v, s in zip(ledger.verdicts, sentences) if v.value == "covered"]
    uncovered = [s for v, s in zip(ledger.verdicts, sentences) if v.value != "covered"]
    records = mine_errors(covered, uncovered, max_n=args.max_n, min_freq=args.min_freq,
                          threshold=args.threshold, min_n=args.min_n,
                          subgram_filter=not args.no_subgram_filter)
    rows = [{"ngram": r.text, "n": len(r.gram), "frequency": r.freq_total, "uncovered": r.freq_uncovered,
             "parsability": Ratio(r.freq_total - r.freq_uncovered, r.freq_total)} for r in records]
    summary = {"sentences": len(sentences), "covered": len(covered), "uncovered": len(uncovered),
               "suspects": len(rows)}
    return {"title": "error mining", "summary": summary, "tables": {"ngrams": rows}}


# ---------------------------------------------------------------------------
# robustness

def _read_analyses(path: str, fmt: str, args) -> list:
    """One analysis per sentence; a sentence written as FAILED is a parse failure."""
    with open_input(path) as fh:
        text = fh.read()
    if fmt == "bracketed":
        chunks = [line for line in text.splitlines() if line.strip()]
    else:
        chunks = [b for b in text.replace("\r\n", "\n").split("\n\n") if b.strip()]
    out = []
    for i, chunk in enumerate(chunks, 1):
        if chunk.strip() == FAILED_MARK:
            out.append(None)
            continue
        try:
            corpus = (read_bracketed(chunk, brackets=args.brackets) if fmt == "bracketed"
                      else read_dep_tsv(chunk, permissive=args.permissive) if fmt == "dep-tsv"
                      else read_gr(chunk))
        except InputError as exc:
            raise type(exc)(f"{path}: {exc}", sentence=i) from None
        if len(corpus) != 1:
            raise InputError(f"{path}: expected one analysis", sentence=i)
        out.append(corpus[0])
    return out


def _parse_outputs(ledger: RunLedger, fmt: str, args) -> list:
    out = []
    for rec in ledger.records:
        if rec.verdict.value in ("failed", "terminated"):
            out.append(None)
            continue
        text = ledger.output(rec.index)
        try:
            corpus = (read_bracketed(text) if fmt == "bracketed"
                      else read_dep_tsv(text, permissive=True) if fmt == "dep-tsv" else read_gr(text))
            out.append(corpus[0] if len(corpus) else None)
        except InputError:
            out.append(None)
    return out


def _robust_from_scores(path: str) -> dict:
    """Per-level UR/LR table: ``parser<TAB>level<TAB>UR<TAB>LR`` lines."""
    table: dict[str, dict[int, tuple[float, float]]] = {}
    with open_input(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 4:
                raise InputError("expected parser, level, UR, LR", line=lineno, source=path)
            try:
                table.setdefault(parts[0], {})[int(parts[1])] = (float(parts[2]), float(parts[3]))
            except ValueError:
                raise InputError("bad number", line=lineno, source=path) from None
    rows = []
    for parser, levels in table.items():
        first, last = min(levels), max(levels)
        rows.append({"parser": parser, "ur_first": levels[first][0], "ur_last": levels[last][0],
                     "ur_degradation": degradation(levels[first][0], levels[last][0]),
                     "lr_first": levels[first][1], "lr_last": levels[last][1],
                     "lr_degradation": degradation(levels[first][1], levels[last][1])})
    return {"title": "robustness (from scores)", "summary": {"parsers": len(rows)},
            "tables": {"degradation": rows}}


def cmd_robust(args) -> dict:
    if args.scores:
        _check_paths(args.scores)
        return _robust_from_scores(args.scores)
    fmt = args.format or "dep-tsv"
    if fmt not in ("bracketed", "dep-tsv", "gr"):
        raise FormatMismatch(f"robustness needs bracketed, dep-tsv or gr analyses, not {fmt}")
    pairs_by_level: dict[int, list] = {}
    if args.pair:
        for level, correct, noisy in args.pair:
            _check_paths(correct, noisy)
            a, b = _read_analyses(correct, fmt, args), _read_analyses(noisy, fmt, args)
            if len(a) != len(b):
                raise LengthMismatch(f"{correct} has {len(a)} analyses, {noisy} has {len(b)}")
            pairs_by_level.setdefault(int(level), []).extend(zip(a, b))
    elif args.correct:
        if not (args.adapter_config and args.run_dir):
            raise InputError("parsing needs --adapter-config and --run-dir")
        _check_paths(args.correct, args.adapter_config)
        adapters = read_adapter_config(Path(args.adapter_config).read_text("utf-8"))
        adapter = adapters[args.adapter] if args.adapter else next(iter(adapters.values()))
        if args.noisy:
            levels = {}
            for level, cpath, npath in args.noisy:
                _check_paths(cpath, npath)
                with open_input(cpath) as c, open_input(npath) as n:
                    levels[int(level)] = read_parallel(c, n)
        else:
            if args.seed is None:
                raise InputError("noise generation needs --seed")
            sentences = _sentences(args.correct)
            spec = _noise_spec(args, sentences)
            levels = generate_parallel(sentences, spec, _levels(args.levels))
        if adapter.output_format == "opaque":
            raise FormatMismatch(f"adapter {adapter.name!r} output is opaque; robustness needs analyses")
        run_root = Path(args.run_dir)
        for level, pairs in levels.items():
            fmt = adapter.output_format
            runs = []
            for side in ("correct", "noisy"):
                sents = [getattr(p, side) for p in pairs]
                ledger = run_corpus(sents, adapter, run_root / f"level{level}-{side}")
                runs.append(_parse_outputs(ledger, fmt, args))
            pairs_by_level[level] = list(zip(*runs))
    else:
        raise InputError("give --pair files, --correct with an adapter, or --scores")
    report = robustness_scores(pairs_by_level, strip_preterminals=args.strip_preterminals)
    rows = [{"level": lv, "pairs": s.n, "ur": Ratio(s.ur_hits, s.n), "lr": Ratio(s.lr_hits, s.n)}
            for lv, s in report.levels.items()]
    n = sum(s.n for s in report.levels.values())
    summary = {"ur": Ratio(sum(s.ur_hits for s in report.levels.values()), n),
               "lr": Ratio(sum(s.lr_hits for s in report.levels.values()), n),
               "ur_degradation": report.ur_degradation, "lr_degradation": report.lr_degradation}
    return {"title": "robustness", "summary": summary, "tables": {"levels": rows}}


def _levels(text: str) -> list[int]:
    try:
        levels = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"bad --levels {text!r}") from None
    if not levels or min(levels) < 0:
        raise InputError("levels must be non-negative integers")
    return levels


def _noise_spec(args, sentences) -> NoiseSpec:
    kwargs = {"seed": args.seed, "ops": tuple(x.strip() for x in args.ops.split(",") if x.strip())}
    if args.keyboard:
        _check_paths(args.keyboard)
        kwargs["keyboard"] = read_keyboard(Path(args.keyboard).read_text("utf-8"))
    try:
        if args.dictionary:
            _check_paths(args.dictionary)
            words = Path(args.dictionary).read_text("utf-8").split()
            return NoiseSpec(dictionary=frozenset(words), **kwargs)
        return NoiseSpec.for_corpus(sentences, **kwargs)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_noise(args) -> dict:
    _check_paths(args.correct)
    if args.seed is None:
        raise InputError("noise generation needs --seed for reproducibility")
    sentences = _sentences(args.correct)
    spec = _noise_spec(args, sentences)
    levels = generate_parallel(sentences, spec, _levels(args.levels))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for level, pairs in levels.items():
        correct, noisy = write_parallel(pairs)
        (out_dir / f"correct.{level}.txt").write_text(correct, "utf-8")
        (out_dir / f"noisy.{level}.txt").write_text(noisy, "utf-8")
        rows.append({"level": level, "pairs": len(pairs), "skipped": len(sentences) - len(pairs),
                     "correct": str(out_dir / f"correct.{level}.txt"),
                     "noisy": str(out_dir / f"noisy.{level}.txt")})
    return {"title": "noise", "summary": {"sentences": len(sentences), "seed": args.seed},
            "tables": {"levels": rows}}


# ---------------------------------------------------------------------------
# bench

def _coverage_summary(ledger, reference: str) -> dict:
    tallies = ledger.tallies()
    n = len(ledger)
    out = {"sentences": n, "coverage": Ratio(tallies[Verdict.COVERED], n)}
    out |= {v.value: Ratio(c, n) for v, c in tallies.items()}
    stab = stability(ledger)
    out["terminated_pct"] = stab["terminated_pct"]
    out["failed_pct"] = stab["failed_pct"]
    if any(g is not None for g in ledger.genres):
        per_genre = genre_coverage(ledger)
        for g, c in per_genre.items():
            out[f"coverage[{g}]"] = c
        if reference in per_genre:
            out["generalizability"] = generalizability(per_genre, reference)
    return out


def cmd_bench(args) -> dict:
    if args.verdicts:
        _check_paths(args.verdicts)
        with open_input(args.verdicts) as fh:
            ledger, _ = read_verdicts(fh)
        return {"title": "coverage (stored verdicts)", "summary": _coverage_summary(ledger, args.reference)}
    if not (args.corpus and args.adapter_config and args.run_dir):
        raise InputError("bench needs a corpus, --adapter-config and --run-dir (or --verdicts)")
    _check_paths(args.corpus, args.adapter_config)
    adapters = read_adapter_config(Path(args.adapter_config).read_text("utf-8"))
    names = args.adapter or list(adapters)
    missing = [n for n in names if n not in adapters]
    if missing:
        raise InputError(f"adapters not in config: {missing}")
    genres, sentences = [], []
    with open_input(args.corpus) as fh:
        for line in fh:
            if not line.strip():
                continue
            if args.genre_tagged:
                genre, _, text = line.rstrip("\n").partition("\t")
                genres.append(genre or None)
                sentences.append(text.split())
            else:
                sentences.append(line.split())
    lengths = [len(s) for s in sentences]

    def one(name):
        ledger = run_corpus(sentences, adapters[name], Path(args.run_dir) / name,
                            max_consecutive_failures=args.max_failures, resume=not args.no_resume)
        summary = {"adapter": name} | _coverage_summary(to_coverage_ledger(ledger, genres), args.reference)
        timing = timing_stats(ledger, lengths=lengths, include_terminated=not args.exclude_terminated)
        summary |= {f"time_{k}": v for k, v in timing.items() if k != "buckets"}
        buckets = [{"adapter": name, "length": k, **v} for k, v in timing["buckets"].items()]
        return summary, buckets

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(one, names))
    if len(results) == 1:
        summary, buckets = results[0]
        return {"title": "bench", "summary": summary, "tables": {"length_buckets": buckets}}
    rows = [s for s, _ in results]
    return {"title": "bench", "summary": {"adapters": len(rows)},
            "tables": {"adapters": [{k: v for k, v in r.items()} for r in rows],
                       "length_buckets": [b for _, bs in results for b in bs]}}


# ---------------------------------------------------------------------------
# subtlety and compare

def cmd_subtlety(args) -> dict:
    summary: dict = {}
    ambiguity, underspec = args.ambiguity, args.underspec
    if args.outputs:
        _check_paths(args.outputs)
        fmt = _guess_format(args.outputs, args.format, "bracketed")
        with open_input(args.outputs) as fh:
            text = fh.read()
        if fmt == "bracketed":
            # one sentence per line; several trees on a line are alternatives
            outputs = []
            for line in text.splitlines():
                if line.strip():
                    outputs.append([] if line.strip() == FAILED_MARK
                                   else list(read_bracketed(line, brackets=args.brackets)))
        else:
            outputs = [[a] for a in _read(args.outputs, fmt, args)]
        measured = measure_output_subtlety(outputs, [m for m in args.markers.split(",") if m])
        summary |= {"covered_sentences": measured["n_sentences"]}
        ambiguity = measured["ambiguity"] if ambiguity is None else ambiguity
        underspec = measured["underspec_rate"] if underspec is None else underspec
    ambiguity = 1.0 if ambiguity is None else ambiguity
    underspec = 0.0 if underspec is None else underspec
    profile = SubtletyProfile(args.pos_size, args.syntax_size, underspec, ambiguity)
    summary |= {"pos_tagset_size": args.pos_size, "syntax_tagset_size": args.syntax_size,
                "detail_score": profile.detail_score, "ambiguity": ambiguity, "underspec_rate": underspec}
    if args.f_score is not None:
        try:
            summary["combined_preciseness"] = combined_preciseness(args.f_score, profile.detail_score,
                                                                   ambiguity, underspec)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    return {"title": "subtlety", "summary": summary}


def _keyed_floats(items, flag) -> dict[str, float]:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise InputError(f"{flag} expects name=number, got {item!r}") from None
        if not sep:
            raise InputError(f"{flag} expects name=number, got {item!r}")
    return out


def cmd_compare(args) -> dict:
    _check_paths(*args.profiles)
    profiles = []
    for p in args.profiles:
        try:
            profiles.append(load_profile(Path(p).read_text("utf-8")))
        except InputError as exc:
            raise type(exc)(f"{p}: {exc}") from None
    weights = _keyed_floats(args.weight, "--weight")
    tiebreak = [c for c in args.tiebreak.split(",") if c] if args.tiebreak else []
    table = rank_criteria(profiles, method=args.method, tie_tol=_keyed_floats(args.tie_tol, "--tie-tol"),
                          tie_abs=_keyed_floats(args.tie_abs, "--tie-abs"),
                          combine_preciseness=not args.raw_preciseness)
    standings = weighted_compare(table, weights, tiebreak, method=args.method)
    rank_rows = [{"parser": n, **table.row(n)} for n in table.names]
    order = [{"position": s.position, "parser": s.name, "score": s.score, "tied": s.tied} for s in standings]
    summary = {"parsers": len(profiles), "criteria": list(table.criteria),
               "weights": {c: weights.get(c, 1.0) for c in table.criteria},
               "winner": standings[0].name + (" (tied)" if standings[0].tied else "")}
    return {"title": "comparison", "summary": summary, "tables": {"ranks": rank_rows, "overall": order}}


# ---------------------------------------------------------------------------
# convert

def cmd_convert(args) -> dict | None:
    _check_paths(args.input)
    src = _guess_format(args.input, args.format, "bracketed")
    corpus = _read(args.input, src, args)
    dst = args.to
    families = {"bracketed": "ps", "dep-tsv": "dep", "tiger": "dep", "gr": "gr"}
    if families[src] != families[dst]:
        raise FormatMismatch(f"cannot convert {src} to {dst}")
    if dst == "bracketed":
        text = write_bracketed(corpus, args.to_brackets or args.brackets)
    elif dst == "dep-tsv":
        text = write_dep_tsv(corpus)
    elif dst == "gr":
        text = write_gr(corpus) + "\n"
    else:
        raise FormatMismatch("TIGER-XML is read-only")
    if args.out and args.out != "-":
        Path(args.out).write_text(text, "utf-8")
    else:
        sys.stdout.write(text)
    return None


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, help="input format (default: by file extension)")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--report", choices=("json", "csv", "table"), default="table")
    common.add_argument("--seed", type=int, help="random seed (required for noise generation)")
    common.add_argument("--jobs", type=int, default=1, help="parallel adapter runs")
    common.add_argument("--permissive", action="store_true", help="accept cyclic dependency graphs etc.")
    common.add_argument("--brackets", choices=("()", "[]"), default="()")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="fepa-bench", description="Parser evaluation toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="score test analyses against gold")
    p.add_argument("gold")
    p.add_argument("test")
    p.add_argument("--metric", required=True,
                   choices=(*PS_METRICS, *DEP_METRICS, *GR_METRICS))
    p.add_argument("--unlabeled", action="store_true", help="bracketed input carries no labels")
    p.add_argument("--drop-preterminals", action="store_true")
    p.add_argument("--drop-width1", action="store_true")
    p.add_argument("--drop-root", action="store_true")
    p.add_argument("--costs", help="label replacement cost table for LA")
    p.add_argument("--hierarchy", help="GR hierarchy file")
    p.add_argument("--strict", action="store_true", help="reject relations outside the hierarchy")
    p.add_argument("--ignore-punct", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("mine", parents=[common], help="n-gram error mining over verdicts")
    p.add_argument("verdicts")
    p.add_argument("--min-n", type=int, default=1)
    p.add_argument("--max-n", type=int, default=5)
    p.add_argument("--no-subgram-filter", action="store_true", help="list every n-gram")
    p.add_argument("--min-freq", type=int, default=2)
    p.add_argument("--threshold", type=float)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("robust", parents=[common], help="UR/LR robustness scores")
    p.add_argument("--pair", nargs=3, action="append", metavar=("LEVEL", "CORRECT", "NOISY"),
                   help="pre-parsed analyses of correct and noisy sentences")
    p.add_argument("--scores", help="table of stored per-level UR/LR scores")
    p.add_argument("--correct", help="correct sentences to parse with an adapter")
    p.add_argument("--noisy", nargs=3, action="append", metavar=("LEVEL", "CORRECT", "NOISY"),
                   help="parallel text files (default: generate noise)")
    p.add_argument("--adapter-config")
    p.add_argument("--adapter")
    p.add_argument("--run-dir")
    p.add_argument("--levels", default="1,2,3")
    p.add_argument("--ops", default="delete,add,transpose")
    p.add_argument("--dictionary")
    p.add_argument("--keyboard")
    p.add_argument("--strip-preterminals", action="store_true")
    p.set_defaults(func=cmd_robust)

    p = sub.add_parser("noise", parents=[common], help="generate a misspelled parallel corpus")
    p.add_argument("correct")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--levels", default="1,2,3")
    p.add_argument("--ops", default="delete,add,transpose")
    p.add_argument("--dictionary")
    p.add_argument("--keyboard")
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("bench", parents=[common], help="run adapters over a corpus")
    p.add_argument("corpus", nargs="?")
    p.add_argument("--adapter-config")
    p.add_argument("--adapter", action="append")
    p.add_argument("--run-dir")
    p.add_argument("--genre-tagged", action="store_true", help="lines are genre<TAB>sentence")
    p.add_argument("--reference", default="newspaper")
    p.add_argument("--verdicts", help="report on stored verdicts instead of running")
    p.add_argument("--max-failures", type=int, default=100)
    p.add_argument("--no-resume", action="store_true")
    p.add_argument("--exclude-terminated", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("subtlety", parents=[common], help="detail, ambiguity and underspecification")
    p.add_argument("--pos-size", type=int, required=True)
    p.add_argument("--syntax-size", type=int, required=True)
    p.add_argument("--outputs", help="parser outputs to measure")
    p.add_argument("--markers", default="X", help="comma-separated underspecification tags")
    p.add_argument("--ambiguity", type=float)
    p.add_argument("--underspec", type=float)
    p.add_argument("--f-score", type=float)
    p.set_defaults(func=cmd_subtlety)

    p = sub.add_parser("compare", parents=[common], help="rank parsers from profile files")
    p.add_argument("profiles", nargs="+")
    p.add_argument("--weight", action="append", metavar="CRITERION=W")
    p.add_argument("--tiebreak", help="comma-separated criteria used to order tied parsers")
    p.add_argument("--method", choices=("min", "dense"), default="min")
    p.add_argument("--tie-tol", action="append", metavar="KEY=REL")
    p.add_argument("--tie-abs", action="append", metavar="KEY=ABS")
    p.add_argument("--raw-preciseness", action="store_true", help="rank plain F-scores")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("convert", parents=[common], help="rewrite a corpus in another format")
    p.add_argument("input")
    p.add_argument("--to", required=True, choices=("bracketed", "dep-tsv", "gr"))
    p.add_argument("--to-brackets", choices=("()", "[]"))
    p.add_argument("--unlabeled", action="store_true")
    p.set_defaults(func=cmd_convert)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        report = args.func(args)
        if report is not None:
            _emit(args, report)
    except FepaError as exc:
        print(f"fepa-bench {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:  # unreadable files, out-of-range parameters
        print(f"fepa-bench {args.command}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - last-resort contract
        log.debug("internal error", exc_info=True)
        print(f"fepa-bench {args.command}: internal error: {exc!r}", file=sys.stderr)
        return 1
    return 0


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
