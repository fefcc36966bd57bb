#!/usr/bin/env python3
"""Drive the harness with the toy parser used in the tests.

Sentence 3 makes the toy parser crash, sentence 4 gets a fragmented parse.
The run is then interrupted by hand (the ledger is cut short) and resumed.
"""
import shlex
import sys
import tempfile
from pathlib import Path

from fepa_bench import AdapterSpec, RunLedger, run_corpus, timing_stats

toy = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "toy_parser.py"
adapter = AdapterSpec("toy", f"{shlex.quote(sys.executable)} {shlex.quote(str(toy))}",
                      invocation="batch-stream", output_format="bracketed",
                      judge="single-root-ps", timeout=5)
corpus = [s.split() for s in ("the dog barked", "a cat sat", "it went CRASH",
                              "two FRAG trees", "nothing odd here")]

with tempfile.TemporaryDirectory() as tmp:
    ledger = run_corpus(corpus, adapter, tmp)
    for rec in ledger.records:
        print(f"{rec.index}  {rec.verdict.value:11s} {rec.millis:8.2f} ms  exit={rec.exit}")
    print("tallies:", {v.value: n for v, n in ledger.tallies().items()})
    print("mean seconds per sentence:", round(timing_stats(ledger)["mean_s"], 4))

    path = Path(tmp) / "ledger.tsv"
    path.write_text("".join(path.read_text().splitlines(keepends=True)[:2]))
    resumed = run_corpus(corpus, adapter, tmp)
    print("resumed run agrees:", resumed.verdicts == ledger.verdicts,
          "| records on disk:", len(RunLedger.load(tmp)))
