import random

import pytest

from fepa_bench.constituency import parseval
from fepa_bench.corpus import DepGraph, read_bracketed, read_parallel, write_parallel
from fepa_bench.coverage import Verdict
from fepa_bench.errors import (
    EmptyLevel,
    ExhaustedCandidates,
    NoCorrections,
    NotEnoughAlterableWords,
    TokenCountMismatch,
)
from fepa_bench.robustness import (
    NoiseSpec,
    default_keyboard,
    degradation,
    foster_scores,
    generate_parallel,
    inject_noise,
    is_alterable,
    lsim,
    misspellings,
    read_keyboard,
    robustness_scores,
    stability,
    ulsim,
)

import cases
from oracles import osa_distance

SENTENCE = "Your username is not logged .".split()


class TestKeyboard:
    def test_qwerty_neighbours(self):
        kb = default_keyboard()
        assert set(kb) == set("abcdefghijklmnopqrstuvwxyz")
        assert set("qwsz") <= set(kb["a"])
        assert "p" not in kb["a"]
        assert all(k in kb[n] for k in kb for n in kb[k])  # symmetric

    def test_read_keyboard(self):
        assert read_keyboard("# map\na: qs\n") == {"a": "qs"}


class TestInjection:
    def test_alterable(self):
        assert is_alterable("Your") and is_alterable("logged,")
        assert not is_alterable("a") and not is_alterable(".") and not is_alterable("e-mail")

    def test_transposition_candidate(self):
        spec = NoiseSpec.for_corpus([SENTENCE], ops=("transpose",))
        assert "Yoru" in misspellings("Your", spec)["transpose"]

    def test_candidates_exclude_dictionary_words(self):
        spec = NoiseSpec(dictionary=frozenset({"form", "from"}))
        for cands in misspellings("from", spec).values():
            assert "form" not in cands

    def test_additions_use_neighbouring_keys(self):
        spec = NoiseSpec()
        kb = spec.keyboard
        for cand in misspellings("cat", spec)["add"]:
            inserted = next(i for i in range(3) if cand[i] != "cat"[i]) if cand[:3] != "cat" else 3
            letter = cand[inserted]
            assert letter in kb[cand[inserted - 1]] + kb[cand[inserted + 1]]

    def test_level_zero_is_identity(self):
        spec = NoiseSpec.for_corpus([SENTENCE], errors_per_sentence=0)
        assert inject_noise(SENTENCE, spec).tokens == tuple(SENTENCE)

    def test_exact_level_and_distance(self):
        spec = NoiseSpec.for_corpus([SENTENCE], errors_per_sentence=3, seed=11)
        out = inject_noise(SENTENCE, spec)
        assert len(out.positions) == 3
        for i in out.positions:
            assert osa_distance(out.tokens[i], SENTENCE[i]) == 1
        assert out.tokens[5] == "."

    def test_deterministic_per_seed_and_index(self):
        spec = NoiseSpec.for_corpus([SENTENCE], errors_per_sentence=2, seed=3)
        assert inject_noise(SENTENCE, spec, index=4) == inject_noise(SENTENCE, spec, index=4)
        draws = {inject_noise(SENTENCE, spec, index=i).tokens for i in range(20)}
        assert len(draws) > 1

    def test_explicit_rng(self):
        spec = NoiseSpec.for_corpus([SENTENCE])
        a = inject_noise(SENTENCE, spec, rng=random.Random(1))
        b = inject_noise(SENTENCE, spec, rng=random.Random(1))
        assert a == b

    def test_capitalisation_kept_on_deletion_inside_word(self):
        spec = NoiseSpec.for_corpus([["Paris"]], ops=("delete",))
        assert all(c[0] == "P" for c in misspellings("Paris", spec)["delete"][1:])

    def test_not_enough_words(self):
        spec = NoiseSpec.for_corpus([["a", "."]])
        with pytest.raises(NotEnoughAlterableWords):
            inject_noise(["a", "."], spec)

    def test_exhausted_candidates(self):
        # every deletion of "ab" is a dictionary word
        spec = NoiseSpec(dictionary=frozenset({"a", "b", "ab"}), ops=("delete",))
        with pytest.raises(ExhaustedCandidates):
            inject_noise(["ab"], spec)

    def test_redraws_past_unusable_word(self):
        spec = NoiseSpec(dictionary=frozenset({"a", "b", "ab", "cd"}), ops=("delete",))
        out = inject_noise(["ab", "cd"], spec)
        assert out.positions == (1,)

    def test_bad_ops(self):
        with pytest.raises(ValueError):
            NoiseSpec(ops=("swap",))

    def test_generated_levels_round_trip(self):
        sents = [SENTENCE, "the quick brown fox jumps".split(), "a .".split()]
        spec = NoiseSpec.for_corpus(sents, seed=5)
        levels = generate_parallel(sents, spec, (1, 2))
        assert len(levels[1]) == 2  # the last sentence cannot carry an error
        for level, pairs in levels.items():
            assert all(p.error_level == level for p in read_parallel(*write_parallel(pairs)))


class TestSimilarity:
    def setup_method(self):
        self.a = DepGraph.from_lists(["x", "y", "z"], [2, 0, 2], ["subj", "root", "obj"])

    def test_identical(self):
        assert ulsim(self.a, self.a) == lsim(self.a, self.a) == 1

    def test_label_change(self):
        b = DepGraph.from_lists(["x", "y", "z"], [2, 0, 2], ["subj", "root", "iobj"])
        assert (ulsim(self.a, b), lsim(self.a, b)) == (1, 0)

    def test_reattachment(self):
        b = DepGraph.from_lists(["x", "y", "z"], [3, 0, 2], ["subj", "root", "obj"])
        assert (ulsim(self.a, b), lsim(self.a, b)) == (0, 0)

    def test_forms_are_ignored(self):
        b = DepGraph.from_lists(["xx", "yy", "zz"], [2, 0, 2], ["subj", "root", "obj"])
        assert lsim(self.a, b) == 1

    def test_failure_scores_zero(self):
        assert ulsim(self.a, None) == lsim(None, self.a) == 0

    def test_token_mismatch(self):
        with pytest.raises(TokenCountMismatch):
            ulsim(self.a, DepGraph.from_lists(["x"], [0]))

    def test_trees(self):
        t1 = read_bracketed("(S (NP (N a)) (VP (V b)))")[0]
        t2 = read_bracketed("(S (NP (N a)) (NP (V b)))")[0]
        t3 = read_bracketed("(S (NP (D a)) (VP (V b)))")[0]
        assert (ulsim(t1, t2), lsim(t1, t2)) == (1, 0)
        assert lsim(t1, t3) == 0
        assert lsim(t1, t3, strip_preterminals=True) == 1


class TestScores:
    def test_identical_pairs(self):
        pairs = [(cases.PELE_GOLD, cases.PELE_GOLD)] * 4
        rep = robustness_scores({1: pairs, 3: pairs})
        assert rep.levels[1].ur == rep.levels[1].lr == 1.0
        assert rep.ur_degradation == rep.lr_degradation == 0.0

    def test_failures_and_pooling(self):
        g = cases.PELE_GOLD
        rep = robustness_scores({1: [(g, g), (g, None)], 2: [(g, cases.PELE_TEST)]})
        assert rep.levels[1].ur == 0.5
        assert rep.ur == pytest.approx(1 / 3)
        assert rep.ur_degradation == 100.0

    def test_empty_level(self):
        with pytest.raises(EmptyLevel):
            robustness_scores({1: []})

    @pytest.mark.parametrize("name", list(cases.NOISE_LEVELS))
    def test_degradation_table(self, name):
        ur1, ur3, d_ur, lr1, lr3, d_lr = cases.NOISE_LEVELS[name]
        assert degradation(ur1, ur3) == pytest.approx(d_ur, abs=0.15)
        assert degradation(lr1, lr3) == pytest.approx(d_lr, abs=0.15)

    def test_degradation_edges(self):
        assert degradation(0.5, 0.5) == 0.0
        assert degradation(0.5, 0.75) < 0


class TestFoster:
    def trees(self):
        gold = read_bracketed("(S (NP a b) (VP c (NP d)))")[0]
        other = read_bracketed("(S (NP a) (VP b c d))")[0]
        return gold, other

    def test_best_correction_wins(self):
        gold, other = self.trees()
        noisy = read_bracketed("(S (NP a b) (VP c d))")[0]
        f1 = parseval(gold, noisy, labeled=True).f_score
        f2 = parseval(other, noisy, labeled=True).f_score
        rep = foster_scores([(noisy, [other, gold])])
        assert rep.per_item[0] == max(f1, f2)
        assert rep.mean == max(f1, f2)

    def test_exact_match_and_failure(self):
        gold, other = self.trees()
        rep = foster_scores([(gold, [other, gold]), (None, [gold])])
        assert rep.per_item == (1.0, 0.0)
        assert rep.total.n_gold == 2 * len(list(gold.subtrees()))

    def test_no_corrections(self):
        gold, _ = self.trees()
        with pytest.raises(NoCorrections):
            foster_scores([(gold, [])])


def test_stability():
    assert stability([Verdict.TERMINATED] * 2 + [Verdict.COVERED] * 998)["terminated_pct"] == pytest.approx(0.2)
    assert stability(["covered"])["terminated_pct"] == 0.0
    assert round(100 * 72 / cases.N_MGTS, 3) == 0.009
