"""
Historical Record Linker

Link person mentions across baptism, marriage and death records into sets
that each denote one individual: a name-keyed blocking index, a
multi-criteria match predicate with role-consistency vetoes, and transitive
clustering, plus a synthetic corpus generator and pairwise scoring.
"""

__version__ = "1.0.0"
__author__ = "Historical Record Linker Contributors"

from historical_record_linker.core import (
    run_match,
    run_generate,
    run_evaluate,
    run_sweep,
)
from historical_record_linker.cluster import cluster_corpus, link_corpus
from historical_record_linker.matcher import records_match
from historical_record_linker.model import MatchConfig

__all__ = [
    "run_match",
    "run_generate",
    "run_evaluate",
    "run_sweep",
    "cluster_corpus",
    "link_corpus",
    "records_match",
    "MatchConfig",
]
