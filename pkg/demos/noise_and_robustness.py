#!/usr/bin/env python3
"""Misspell a few sentences and measure how a (pretend) parser copes.

The "parser" here labels every word by its last letter, so a misspelling
that touches the end of a word changes a label but never the structure.
That is enough to see UR and LR pull apart.
"""
from fepa_bench import DepGraph, NoiseSpec, generate_parallel, robustness_scores

corpus = [s.split() for s in (
    "Your username is not logged .",
    "the printer cannot find the network folder .",
    "please check the server version before the update .",
)]


def toy_parse(words):
    # chain every word to the next one
    heads = list(range(2, len(words) + 1)) + [0]
    return DepGraph.from_lists(words, heads, [w[-1] for w in words])


spec = NoiseSpec.for_corpus(corpus, seed=42)
levels = generate_parallel(corpus, spec, (1, 2, 3))
for level, pairs in levels.items():
    print(f"-- level {level}")
    for p in pairs:
        print("  ", " ".join(p.noisy))

pairs_by_level = {lv: [(toy_parse(p.correct), toy_parse(p.noisy)) for p in pairs]
                  for lv, pairs in levels.items()}
report = robustness_scores(pairs_by_level)
print()
for lv, s in report.levels.items():
    print(f"level {lv}: UR {s.ur:.2f}  LR {s.lr:.2f}")
print(f"LR degradation level 1 -> 3: {report.lr_degradation:.1f}%")
