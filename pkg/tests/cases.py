"""Worked fixtures and published table rows shared by the tests."""
from fepa_bench.corpus import DepGraph

# unlabelled bracketings of "He hit the post while the all-star goalkeeper was out of the goal"
POST_GOLD = "[[He [hit [the post]]] [while [[the all-star goalkeeper] [was [out [of [the goal]]]]]]]"
POST_TEST = "[He [[hit [the post]] [while [[the [[all-star] goalkeeper]] [was [out of [the goal]]]]]]]"

LIVERPOOL_GOLD = "[S [NP [N Liverpool]] [VP [V is] [VP [V playing] [ADVP [ADV well]]]]]"
LIVERPOOL_TEST = "[S [NP [N Liverpool]] [VP [V is] [VP playing well]]]"
LIVERPOOL_LA = (1.0, 1.0, 0.8, 8 / 11)

PELE_FORMS = "Pele promised him to bring the ball".split()
PELE_GOLD = DepGraph.from_lists(PELE_FORMS, [2, 0, 2, 5, 2, 7, 5],
                                ["subj", "main", "obj", "aux", "comp", "det", "obj"])
PELE_TEST = DepGraph.from_lists(PELE_FORMS, [2, 0, 5, 5, 2, 7, 5],
                                ["nsubj", "main", "obj", "aux", "comp", "nn", "dobj"])
# second parse: "him" re-attached, "the" lost its head, gold labels elsewhere
PELE_LIN_TEST = DepGraph.from_lists(PELE_FORMS, [2, 0, 5, 5, 2, 0, 5],
                                    ["subj", "main", "obj", "aux", "comp", None, "obj"])

GR_GOLD = "(dobj playing well)\n(aux _ playing is)\n(ncsubj playing Liverpool _)\n"
GR_TEST = "(obj playing well)\n(aux _ playing is)\n(subj playing Liverpool _)\n"

# name: (pos tagset, syntax tagset, printed detail score)
TAGSETS = {
    "APP": (0, 20, 1.3),
    "C&C": (45, 48, 2.5),
    "LGP": (8, 107, 2.5),
    "MINIPAR": (18, 27, 2.1),
    "SP": (45, 48, 2.5),
    "StatCCG": (45, 1044, 3.8),
}

# name: (F-score, ambiguity, underspecification rate, printed combined score)
PRECISENESS = {
    "APP": (70.7, 1.0, 0.0006, 91.9),
    "C&C": (84.6, 1.0, 0.0, 212.2),
    "LGP": (48.5, 1.259, 0.0, 95.6),
    "MINIPAR": (83.8, 1.0, 0.0, 172.5),
    "SP": (85.7, 1.0, 0.0, 214.9),
    "StatCCG": (84.0, 1.0, 0.0, 323.0),
}

GENRES = ("newspaper", "legislation", "fiction", "nonfiction", "religion", "biomedicine")
# name: (per-genre coverage in GENRES order, printed generalizability)
GENRE_COVERAGE = {
    "APP": ((99.8, 98.9, 97.5, 96.4, 93.1, 98.9), 93.3),
    "C&C": ((87.8, 84.9, 86.0, 81.2, 75.5, 84.8), 86.0),
    "LGP": ((74.1, 38.7, 38.4, 42.1, 15.0, 49.4), 20.2),
    "MINIPAR": ((88.0, 68.8, 68.0, 71.5, 34.4, 70.1), 39.1),
    "SP": ((99.8, 99.5, 98.0, 98.3, 98.9, 98.5), 98.2),
    "StatCCG": ((96.7, 85.2, 87.7, 86.7, 94.0, 83.3), 86.1),
}

# name: (UR L1, UR L3, printed UR D, LR L1, LR L3, printed LR D)
NOISE_LEVELS = {
    "APP": (59.2, 14.9, 74.9, 54.5, 7.5, 86.3),
    "C&C": (72.9, 40.4, 44.6, 60.8, 14.9, 75.5),
    "LGP": (40.4, 8.5, 78.9, 22.0, 3.2, 85.5),
    "MINIPAR": (57.4, 1.1, 98.2, 33.2, 1.1, 96.8),
    "SP": (71.0, 25.5, 64.0, 29.4, 1.1, 96.4),
    "StatCCG": (72.6, 30.9, 57.5, 58.8, 20.2, 65.6),
}

# raw inputs for the overall comparison
COVERAGE_AVG = {"APP": 98.5, "C&C": 85.0, "LGP": 50.2, "MINIPAR": 72.1, "SP": 99.2, "StatCCG": 89.1}
SEC_PER_SENT = {"APP": 0.39, "C&C": 0.021, "LGP": 0.64, "MINIPAR": 0.014, "SP": 0.69, "StatCCG": 1.97}
N_MGTS = 826485
ROBUSTNESS = {  # LR average, LR degradation, terminated %
    "APP": (37.0, 86.3, 100 * 1 / N_MGTS),
    "C&C": (45.4, 75.5, 0.006),
    "LGP": (17.6, 85.5, 0.206),
    "MINIPAR": (20.6, 96.8, 100 * 72 / N_MGTS),
    "SP": (19.2, 96.4, 0.002),
    "StatCCG": (44.0, 65.6, 0.0),
}
# ties the source treats as "too close to call"
TIE_TOL = {"preciseness": 0.05, "detail": 0.02}
TIE_ABS = {"stability": 0.001}

CRITERION_RANKS = {  # preciseness, coverage, robustness, efficiency, subtlety
    "APP": (5, 2, 3, 3, 6),
    "C&C": (2, 4, 2, 2, 2),
    "LGP": (5, 6, 6, 4, 5),
    "MINIPAR": (4, 5, 5, 1, 4),
    "SP": (2, 1, 4, 5, 2),
    "StatCCG": (1, 3, 1, 6, 1),
}
ROBUSTNESS_SUBRANKS = {  # noisy input, degradation, stability, overall
    "APP": (3, 4, 1, 3),
    "C&C": (1, 2, 4, 2),
    "LGP": (6, 3, 6, 6),
    "MINIPAR": (4, 6, 5, 5),
    "SP": (5, 5, 3, 4),
    "StatCCG": (2, 1, 1, 1),
}
SUBTLETY_SUBRANKS = {  # detail, ambiguity/underspecification, overall
    "APP": (6, 5, 6),
    "C&C": (2, 1, 2),
    "LGP": (2, 6, 5),
    "MINIPAR": (5, 1, 4),
    "SP": (2, 1, 2),
    "StatCCG": (1, 1, 1),
}
SCHEMES = {  # weights and the printed overall positions
    "A": ({"preciseness": 2, "subtlety": 0},
          {"APP": 5, "C&C": 2, "LGP": 6, "MINIPAR": 4, "SP": 3, "StatCCG": 1}),
    "B": ({"efficiency": 0.5},
          {"APP": 4, "C&C": 2, "LGP": 6, "MINIPAR": 5, "SP": 3, "StatCCG": 1}),
    "C": ({"coverage": 2, "efficiency": 2},
          {"APP": 5, "C&C": 2, "LGP": 6, "MINIPAR": 4, "SP": 1, "StatCCG": 2}),
}


def published_profiles():
    from fepa_bench.profile import ParserProfile, SubtletyProfile

    out = []
    for name in TAGSETS:
        pos, syn, _ = TAGSETS[name]
        f, amb, under, _ = PRECISENESS[name]
        noisy, degr, stab = ROBUSTNESS[name]
        out.append(ParserProfile(name, f, COVERAGE_AVG[name],
                                 {"noisy": noisy, "degradation": degr, "stability": stab},
                                 SEC_PER_SENT[name], SubtletyProfile(pos, syn, under, amb)))
    return out


def rank_profiles():
    from fepa_bench.profile import CRITERIA, ParserProfile

    return [ParserProfile(name, ranks=dict(zip(CRITERIA, r))) for name, r in CRITERION_RANKS.items()]
