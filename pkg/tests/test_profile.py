import json

import pytest

from fepa_bench.corpus import DepGraph, read_bracketed
from fepa_bench.errors import AllZeroWeights, InputError, TooFewProfiles
from fepa_bench.profile import (
    CRITERIA,
    ParserProfile,
    SubtletyProfile,
    combined_preciseness,
    composite_rank,
    detail_score,
    load_profile,
    measure_output_subtlety,
    rank_criteria,
    rank_values,
    weighted_compare,
)

import cases


def published_table():
    return rank_criteria(cases.published_profiles(), tie_tol=cases.TIE_TOL, tie_abs=cases.TIE_ABS)


def positions(standings):
    return {s.name: s.position for s in standings}


class TestScores:
    @pytest.mark.parametrize("name", list(cases.TAGSETS))
    def test_detail_scores(self, name):
        pos, syn, printed = cases.TAGSETS[name]
        assert detail_score(pos, syn) == pytest.approx(printed, abs=0.05)

    @pytest.mark.parametrize("name", list(cases.PRECISENESS))
    def test_combined_scores(self, name):
        f, amb, under, printed = cases.PRECISENESS[name]
        pos, syn, _ = cases.TAGSETS[name]
        assert combined_preciseness(f, detail_score(pos, syn), amb, under) == pytest.approx(printed, abs=0.5)

    def test_empty_tagset_contributes_nothing(self):
        assert detail_score(0, 10) == 1.0
        assert detail_score(0, 0) == 0.0

    def test_ambiguity_below_one_rejected(self):
        with pytest.raises(ValueError):
            combined_preciseness(80, 2.0, 0.5)

    def test_profile_properties(self):
        s = SubtletyProfile(45, 48, underspec_rate=0.5, ambiguity=2.0)
        assert s.au_factor == 3.0
        p = ParserProfile("x", preciseness=60.0, subtlety=s)
        assert p.combined_preciseness == pytest.approx(60 * s.detail_score / 3)
        assert ParserProfile("y", preciseness=60.0).combined_preciseness == 60.0


class TestMeasurement:
    def test_ambiguity_from_alternatives(self):
        # 1259 analyses over 1000 covered sentences, plus one uncovered
        outputs = [["a", "b"]] * 259 + [["a"]] * 741 + [[]]
        m = measure_output_subtlety(outputs)
        assert m["ambiguity"] == pytest.approx(1.259)
        assert m["n_sentences"] == 1000

    def test_underspecification_markers(self):
        plain = read_bracketed("(S (NP a) (VP b))")[0]
        marked = read_bracketed("(S (X a) (VP b))")[0]
        outputs = [[plain]] * 19988 + [[marked]] * 12
        assert measure_output_subtlety(outputs, ["X"])["underspec_rate"] == pytest.approx(0.0006)

    def test_dependency_markers(self):
        g = DepGraph.from_lists(["a", "b"], [2, 0], ["dep", "root"])
        assert measure_output_subtlety([[g]], ["dep"])["underspec_rate"] == 1.0

    def test_no_covered_sentences(self):
        assert measure_output_subtlety([[], []])["n_sentences"] == 0


class TestRanking:
    def test_competition_and_dense(self):
        assert rank_values([9, 8, 8, 7]) == [1, 2, 2, 4]
        assert rank_values([9, 8, 8, 7], method="dense") == [1, 2, 2, 3]
        assert rank_values([3, 1, 2], higher_better=False) == [3, 1, 2]
        with pytest.raises(ValueError):
            rank_values([1], method="average")

    def test_tolerances(self):
        assert rank_values([100, 98, 90], tie_tol=0.05) == [1, 1, 3]
        assert rank_values([0.001, 0.0015, 0.2], higher_better=False, tie_abs=0.001) == [1, 1, 3]

    def test_composite(self):
        assert composite_rank([(1, 3), (2, 2), (3, 3)]) == [1, 1, 3]
        assert composite_rank([(1, 3), (2, 2), (3, 3)], tiebreak=[2, 1, 3]) == [2, 1, 3]

    @pytest.mark.parametrize("idx,crit", list(enumerate(CRITERIA)))
    def test_criterion_ranks_from_raw_scores(self, idx, crit):
        table = published_table()
        assert {n: table.row(n)[crit] for n in table.names} == {
            n: r[idx] for n, r in cases.CRITERION_RANKS.items()}

    def test_robustness_sub_ranks(self):
        table = published_table()
        sub = table.sub_ranks["robustness"]
        for i, name in enumerate(table.names):
            expected = cases.ROBUSTNESS_SUBRANKS[name]
            assert (sub["noisy"][i], sub["degradation"][i], sub["stability"][i]) == expected[:3]

    def test_subtlety_sub_ranks(self):
        table = published_table()
        sub = table.sub_ranks["subtlety"]
        for i, name in enumerate(table.names):
            assert (sub["detail"][i], sub["au"][i]) == cases.SUBTLETY_SUBRANKS[name][:2]

    def test_precomputed_ranks_win(self):
        table = rank_criteria(cases.rank_profiles())
        assert table.row("LGP") == dict(zip(CRITERIA, cases.CRITERION_RANKS["LGP"]))

    def test_too_few(self):
        with pytest.raises(TooFewProfiles):
            rank_criteria(cases.published_profiles()[:1])

    def test_monotone_transform_keeps_ranks(self):
        values = [70.7, 84.6, 48.5, 83.8, 85.7]
        assert rank_values(values) == rank_values([v ** 3 + 5 for v in values])


class TestWeightedCompare:
    def table(self):
        return rank_criteria(cases.rank_profiles())

    def test_uniform_weights(self):
        got = positions(weighted_compare(self.table()))
        assert got["LGP"] == 6
        assert got["C&C"] == got["StatCCG"] == 1

    def test_tie_is_reported(self):
        standings = {s.name: s for s in weighted_compare(self.table())}
        assert standings["C&C"].tied and standings["C&C"].score == pytest.approx(2.4)
        assert not standings["LGP"].tied

    def test_scheme_b(self):
        weights, printed = cases.SCHEMES["B"]
        assert positions(weighted_compare(self.table(), weights)) == printed

    def test_scheme_a_top_and_bottom(self):
        weights, printed = cases.SCHEMES["A"]
        got = positions(weighted_compare(self.table(), weights, ("preciseness",)))
        assert {k: got[k] for k in ("StatCCG", "C&C", "SP", "LGP")} == {
            k: printed[k] for k in ("StatCCG", "C&C", "SP", "LGP")}

    @pytest.mark.xfail(strict=True, reason="the published ranks do not follow from the published weights")
    def test_scheme_c(self):
        weights, printed = cases.SCHEMES["C"]
        assert positions(weighted_compare(self.table(), weights)) == printed

    def test_zero_weights(self):
        with pytest.raises(AllZeroWeights):
            weighted_compare(self.table(), {c: 0 for c in CRITERIA})

    def test_bad_weights(self):
        with pytest.raises(InputError):
            weighted_compare(self.table(), {"speed": 1})
        with pytest.raises(InputError):
            weighted_compare(self.table(), {"coverage": -1})

    def test_identical_profiles_tie(self):
        p = cases.published_profiles()[0]
        table = rank_criteria([p, ParserProfile("copy", p.preciseness, p.coverage, p.robustness,
                                                p.efficiency, p.subtlety)])
        assert [s.position for s in weighted_compare(table)] == [1, 1]

    def test_dense_method(self):
        got = positions(weighted_compare(self.table(), method="dense"))
        assert got["SP"] == 2


def test_profile_json_round_trip(tmp_path):
    p = cases.published_profiles()[2]
    path = tmp_path / "lgp.json"
    path.write_text(json.dumps(p.to_dict()))
    back = load_profile(path.read_text())
    assert back.subtlety == p.subtlety
    assert back.combined_preciseness == pytest.approx(p.combined_preciseness)
