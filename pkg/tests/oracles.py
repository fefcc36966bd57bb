"""Slow, obviously-correct reference implementations used as test oracles."""
from fractions import Fraction

SEP = "\x1f"


def _contains(sentence, gram) -> bool:
    return SEP + SEP.join(gram) + SEP in SEP + SEP.join(sentence) + SEP


def brute_force_mining(covered, uncovered, max_n, min_freq=1, threshold=None):
    """{gram: parsability} by scanning every sentence for every candidate string."""
    sentences = [(tuple(s), True) for s in covered] + [(tuple(s), False) for s in uncovered]
    parsability = {}
    for n in range(1, max_n + 1):
        grams = {s[i:i + n] for s, _ in sentences for i in range(len(s) - n + 1)}
        for g in grams:
            hits = [ok for s, ok in sentences if _contains(s, g)]
            parsability[g] = (Fraction(sum(hits), len(hits)), len(hits))
    kept = {}
    for g, (p, freq) in parsability.items():
        if len(g) > 1 and not p < min(parsability[g[:-1]][0], parsability[g[1:]][0]):
            continue
        if freq < min_freq or (threshold is not None and not p < threshold):
            continue
        kept[g] = p
    return kept


def osa_distance(a: str, b: str) -> int:
    """Optimal string alignment distance (adjacent transposition costs 1)."""
    d = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        d[i][0] = i
    for j in range(len(b) + 1):
        d[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost)
            if i > 1 and j > 1 and a[i - 1] == b[j - 2] and a[i - 2] == b[j - 1]:
                d[i][j] = min(d[i][j], d[i - 2][j - 2] + 1)
    return d[len(a)][len(b)]
