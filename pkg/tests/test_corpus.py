import warnings

import pytest

from fepa_bench.corpus import (
    UNLABELED,
    DepGraph,
    ParallelPair,
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
from fepa_bench.errors import (
    BadColumnCount,
    CycleDetected,
    DanglingEdgeRef,
    EmptyNode,
    HeadOutOfRange,
    InputError,
    LengthMismatch,
    MalformedRelation,
    MissingAttribute,
    MixedTerminalNonterminal,
    UnbalancedBrackets,
)

import cases


class TestBracketed:
    def test_labelled_tree(self):
        (tree,) = read_bracketed("(S (NP (N Liverpool)) (VP (V is) (ADV well)))")
        assert tree.label == "S"
        assert tree.words() == ["Liverpool", "is", "well"]
        assert tree.span == (1, 3)
        assert [n.label for n in tree.subtrees()] == ["S", "NP", "N", "VP", "V", "ADV"]

    def test_square_brackets_and_unlabelled(self):
        (tree,) = read_bracketed(cases.POST_GOLD, allow_unlabeled=True, brackets="[]")
        assert len(tree.words()) == 13
        assert {n.label for n in tree.subtrees()} == {UNLABELED}

    def test_ptb_wrapper_is_unwrapped(self):
        (tree,) = read_bracketed("( (S (NP x) (VP y)) )")
        assert tree.label == "S"

    def test_indices_restart_per_tree(self):
        trees = read_bracketed("(S a b)\n(S c)")
        assert [t.span for t in trees] == [(1, 2), (1, 1)]

    @pytest.mark.parametrize("text, error", [
        ("(S (NP a)", UnbalancedBrackets),
        ("(S a))", UnbalancedBrackets),
        ("(S (NP) a)", EmptyNode),
    ])
    def test_malformed(self, text, error):
        with pytest.raises(error):
            read_bracketed(text)

    def test_mixed_children_only_rejected_when_strict(self):
        text = "(S (NP a) b)"
        assert read_bracketed(text)[0].words() == ["a", "b"]
        with pytest.raises(MixedTerminalNonterminal):
            read_bracketed(text, strict=True)

    def test_round_trip(self):
        text = "(S (NP (DT the) (NN dog)) (VP (VBD barked)))"
        trees = read_bracketed(text)
        assert read_bracketed(write_bracketed(trees)) == trees


DEP = """\
1\tPele\t_\tNNP\t2\tsubj
2\tpromised\t_\tVBD\t0\tmain
3\thim\t_\tPRP\t2\tobj

1\tYes\t_\tUH\t0\troot
"""


class TestDependency:
    def test_read_six_columns(self):
        corpus = read_dep_tsv(DEP)
        assert len(corpus) == 2
        assert corpus[0].heads == (2, 0, 2)
        assert corpus[0].labels == ("subj", "main", "obj")
        assert corpus[0].tokens[0].lemma is None and corpus[0].tokens[0].pos == "NNP"

    def test_conllu_ten_columns_skip_ranges(self):
        text = ("# sent_id = 1\n"
                "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
                "1\tdo\tdo\tAUX\t_\t_\t3\taux\t_\t_\n"
                "2\tn't\tnot\tPART\t_\t_\t3\tadvmod\t_\t_\n"
                "3\tgo\tgo\tVERB\t_\t_\t0\troot\t_\t_\n")
        (g,) = read_dep_tsv(text)
        assert g.forms == ("do", "n't", "go")
        assert g.heads == (3, 3, 0)

    def test_round_trip(self):
        corpus = read_dep_tsv(DEP)
        assert list(read_dep_tsv(write_dep_tsv(corpus))) == list(corpus)

    def test_errors(self):
        with pytest.raises(BadColumnCount) as info:
            read_dep_tsv("1\ta\t_\t0\troot\n")
        assert info.value.line == 1
        with pytest.raises(HeadOutOfRange):
            read_dep_tsv("1\ta\t_\t_\t5\troot\n")

    def test_cycle_rejected_unless_permissive(self):
        text = "1\ta\t_\t_\t2\tx\n2\tb\t_\t_\t1\tx\n"
        with pytest.raises(CycleDetected):
            read_dep_tsv(text)
        (g,) = read_dep_tsv(text, permissive=True)
        assert g.has_cycle and g.roots == ()

    def test_graph_helpers(self):
        assert cases.PELE_GOLD.roots == (2,)
        assert not cases.PELE_GOLD.has_cycle


class TestGr:
    def test_read_and_write(self):
        (gs,) = read_gr(cases.GR_GOLD)
        assert [r.name for r in gs] == ["dobj", "aux", "ncsubj"]
        assert gs.relations[2].args == ("playing", "Liverpool", "_")
        assert read_gr(write_gr(gs))[0] == gs

    def test_extra_blank_lines_are_empty_sentences(self):
        sets = read_gr("(a x y)\n\n\n(b x y)\n")
        assert [len(s) for s in sets] == [1, 0, 1]

    def test_malformed(self):
        with pytest.raises(MalformedRelation):
            read_gr("(dobj playing)\n")


TIGER = """<corpus><body>
<s id="s1"><graph>
  <terminals>
    <t id="s1_1" word="Pele" pos="NE"/>
    <t id="s1_2" word="promised" pos="VVFIN">
      <edge label="SB" idref="s1_1"/>
    </t>
  </terminals>
</graph></s>
</body></corpus>"""


class TestTiger:
    def test_edges_inside_terminals(self):
        (g,) = read_tiger_xml(TIGER)
        assert g.forms == ("Pele", "promised")
        assert g.heads == (2, 0)
        assert g.labels == ("SB", None)

    def test_dangling_and_missing(self):
        with pytest.raises(DanglingEdgeRef):
            read_tiger_xml(TIGER.replace('idref="s1_1"', 'idref="s1_9"'))
        with pytest.raises(MissingAttribute):
            read_tiger_xml(TIGER.replace(' word="Pele"', ""))

    def test_empty_sentence_warns(self):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            corpus = read_tiger_xml('<corpus><s id="e"><graph/></s></corpus>')
        assert len(corpus[0]) == 0
        assert caught


class TestParallel:
    def test_error_level_is_token_difference(self):
        pairs = read_parallel("Your username is not logged .\n", "Yoru username is not logged .\n")
        assert pairs == [ParallelPair(tuple("Your username is not logged .".split()),
                                      tuple("Yoru username is not logged .".split()), 1)]

    def test_mismatches(self):
        with pytest.raises(LengthMismatch):
            read_parallel("a b\nc\n", "a b\n")
        with pytest.raises(LengthMismatch) as info:
            read_parallel("a b\n", "a\n")
        assert info.value.sentence == 1

    def test_round_trip(self):
        pairs = read_parallel("a b c\nd e\n", "a x c\ny z\n")
        assert read_parallel(*write_parallel(pairs)) == pairs


def test_input_errors_are_value_errors_with_exit_code_two():
    assert issubclass(InputError, ValueError)
    assert InputError("x").exit_code == 2


def test_depgraph_length_check():
    with pytest.raises(ValueError):
        DepGraph.from_lists(["a", "b"], [0])
