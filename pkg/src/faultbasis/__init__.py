"""Compact, maximally diverse bases of wrong programs from code-test verdict matrices."""

from .errors import FaultBasisError
from .judgemetrics import (GeneratedTestResult, MetricsReport, hack_rate, is_excluded, is_valid,
                           pass_rate, select_correct_codes)
from .pipeline import PipelineConfig, reduce_tests, run_pipeline
from .prefilter import FilterConfig, FilterReport, Outcome, all_ones_columns, prefilter_problem, row_failure_rate
from .records import ProblemBundle, ingest
from .sigmatrix import (Signature, Verdict, VerdictMatrix, avg_diversity, build_matrix, column_basis,
                        in_span, jaccard, rank)
from .synth import SynthSpec, synth
from .wrongselect import (BasisSelection, SearchConfig, SearchTrace, best_neighbor, brute_force_best_basis,
                          local_search, random_basis, wrong_select)

__version__ = "0.1.0"

__all__ = [
    "BasisSelection", "FaultBasisError", "FilterConfig", "FilterReport", "GeneratedTestResult",
    "MetricsReport", "Outcome", "PipelineConfig", "ProblemBundle", "SearchConfig", "SearchTrace",
    "Signature", "SynthSpec", "Verdict", "VerdictMatrix", "all_ones_columns", "avg_diversity",
    "best_neighbor", "brute_force_best_basis", "build_matrix", "column_basis", "hack_rate", "in_span",
    "ingest", "is_excluded", "is_valid", "jaccard", "local_search", "pass_rate", "prefilter_problem",
    "random_basis", "rank", "reduce_tests", "row_failure_rate", "run_pipeline", "select_correct_codes",
    "synth", "wrong_select",
]
