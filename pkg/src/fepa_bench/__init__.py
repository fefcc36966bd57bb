"""Parser evaluation toolkit.

Metrics for phrase-structure and dependency output, coverage and error
mining, misspelling robustness, a subprocess benchmark harness and
multi-criteria parser comparison.
"""
from .constituency import (
    CostTable,
    ParsevalScore,
    SpanSet,
    crossing_brackets,
    la_corpus,
    la_score,
    lineages,
    parseval,
    parseval_corpus,
)
from .corpus import (
    Corpus,
    DepGraph,
    GrRelation,
    GrSet,
    ParallelPair,
    PhraseTree,
    Token,
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
from .coverage import (
    CoverageLedger,
    NgramRecord,
    Verdict,
    coverage,
    generalizability,
    genre_coverage,
    mine_errors,
)
from .dependency import DepScorecard, GrHierarchy, dep_scores, gr_match, lin_classify
from .errors import AdapterError, FepaError, InputError
from .harness import AdapterSpec, RunLedger, make_judge, read_adapter_config, run_corpus, timing_stats
from .profile import (
    ParserProfile,
    SubtletyProfile,
    combined_preciseness,
    detail_score,
    measure_output_subtlety,
    rank_criteria,
    weighted_compare,
)
from .robustness import (
    NoiseSpec,
    degradation,
    foster_scores,
    generate_parallel,
    inject_noise,
    lsim,
    robustness_scores,
    stability,
    ulsim,
)

__version__ = "0.1.0"
