#!/usr/bin/env python3
"""Score one small parse with each family of metrics.

Run from the repository root:  python3 demos/metrics_walkthrough.py
"""
from fepa_bench import (
    DepGraph,
    crossing_brackets,
    dep_scores,
    gr_match,
    la_score,
    lin_classify,
    lineages,
    parseval,
    read_bracketed,
    read_gr,
)

gold = read_bracketed("(S (NP (N Liverpool)) (VP (V is) (VP (V playing) (ADVP (ADV well)))))")[0]
test = read_bracketed("(S (NP (N Liverpool)) (VP (V is) (VP playing well)))")[0]

print("== bracket overlap ==")
for labeled in (False, True):
    s = parseval(gold, test, labeled=labeled)
    kind = "labeled" if labeled else "unlabeled"
    print(f"{kind:9s}  matched {s.n_matched}  gold {s.n_gold}  test {s.n_test}  F {s.f_score:.3f}")
print("crossing brackets:", crossing_brackets(gold, test))

print("\n== leaf-ancestor ==")
for word, g, t in zip(gold.words(), lineages(gold), lineages(test)):
    print(f"{word:10s} {' '.join(g):30s} | {' '.join(t)}")
la = la_score(gold, test)
print("per word:", [round(x, 3) for x in la.per_word], " sentence:", round(la.sentence, 4))

print("\n== dependencies ==")
forms = "Pele promised him to bring the ball".split()
dgold = DepGraph.from_lists(forms, [2, 0, 2, 5, 2, 7, 5], ["subj", "main", "obj", "aux", "comp", "det", "obj"])
dtest = DepGraph.from_lists(forms, [2, 0, 5, 5, 2, 7, 5], ["nsubj", "main", "obj", "aux", "comp", "nn", "dobj"])
for name, frac in dep_scores(dgold, dtest).fractions().items():
    print(f"{name:11s} {frac}")
print("Lin categories:", dict(zip(forms, lin_classify(dgold, dtest).categories)))

print("\n== grammatical relations ==")
g = read_gr("(dobj playing well)\n(ncsubj playing Liverpool _)\n")
t = read_gr("(obj playing well)\n(subj playing Liverpool _)\n")
r = gr_match(g, t)
print(f"tolerant match: P {r.precision} R {r.recall}  confusions {dict(r.confusion)}")
