#!/usr/bin/env python3
"""Rank six parser profiles and see how weights move the overall order."""
from fepa_bench import ParserProfile, SubtletyProfile, rank_criteria, weighted_compare

N = 826485
rows = {  # F, coverage, (noisy LR, degradation, terminated %), s/sentence, (pos, syntax, underspec, ambiguity)
    "APP": (70.7, 98.5, (37.0, 86.3, 100 / N), 0.39, (0, 20, 0.0006, 1.0)),
    "C&C": (84.6, 85.0, (45.4, 75.5, 0.006), 0.021, (45, 48, 0.0, 1.0)),
    "LGP": (48.5, 50.2, (17.6, 85.5, 0.206), 0.64, (8, 107, 0.0, 1.259)),
    "MINIPAR": (83.8, 72.1, (20.6, 96.8, 7200 / N), 0.014, (18, 27, 0.0, 1.0)),
    "SP": (85.7, 99.2, (19.2, 96.4, 0.002), 0.69, (45, 48, 0.0, 1.0)),
    "StatCCG": (84.0, 89.1, (44.0, 65.6, 0.0), 1.97, (45, 1044, 0.0, 1.0)),
}
profiles = [ParserProfile(name, f, cov, dict(zip(("noisy", "degradation", "stability"), rob)), secs,
                          SubtletyProfile(*sub))
            for name, (f, cov, rob, secs, sub) in rows.items()]

table = rank_criteria(profiles, tie_tol={"preciseness": 0.05, "detail": 0.02},
                      tie_abs={"stability": 0.001})
print(f"{'parser':8s}", *(f"{c[:6]:>7s}" for c in table.criteria))
for name in table.names:
    print(f"{name:8s}", *(f"{r:7d}" for r in table.row(name).values()))

for title, weights in (("equal weights", {}), ("speed matters less", {"efficiency": 0.5}),
                       ("accuracy first", {"preciseness": 2, "subtlety": 0})):
    order = weighted_compare(table, weights, ("preciseness",))
    print(f"\n{title}:", ", ".join(f"{s.position}. {s.name} ({s.score:.2f})" for s in order))
