"""Transitive grouping of matching records into record sets."""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import List, Tuple
from concurrent.futures import ThreadPoolExecutor, as_completed

from historical_record_linker.indexer import IndexGroup, build_index
from historical_record_linker.matcher import active_ruleset, records_match
from historical_record_linker.model import Corpus, MatchConfig, MatchDecision
from historical_record_linker.rules import evaluate_rules
from historical_record_linker.union_find import UnionFind

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RecordSet:
    """Mentions asserted to be one individual; set_id is the smallest member id."""

    set_id: str
    members: Tuple[str, ...]

    @classmethod
    def of(cls, members) -> "RecordSet":
        ordered = tuple(sorted(members))
        return cls(set_id=ordered[0], members=ordered)

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class VetoConflict:
    """Two members of one set that a role rule declares incompatible."""

    set_id: str
    record_a: str
    record_b: str
    rule_id: str


@dataclass
class LinkageResult:
    groups: List[IndexGroup] = field(default_factory=list)
    sets: List[RecordSet] = field(default_factory=list)
    decisions: List[MatchDecision] = field(default_factory=list)

    @property
    def matched_pairs(self) -> int:
        return sum(1 for d in self.decisions if d.matched)


def candidate_pairs(group: IndexGroup, corpus: Corpus, window_years: int):
    """
    Within-group pairs whose event years lie inside the window.

    Members are date-sorted, so the scan for each record stops at the first
    later record outside the window.
    """
    years = [corpus.event_of(corpus.persons[rid]).date.year for rid in group.members]
    for i, first in enumerate(group.members):
        for j in range(i + 1, len(group.members)):
            if years[j] - years[i] > window_years:
                break
            yield first, group.members[j]


def link_group(
    group: IndexGroup,
    corpus: Corpus,
    config: MatchConfig,
) -> Tuple[List[RecordSet], List[MatchDecision]]:
    """Record sets of one group plus the decisions kept in explain mode."""
    uf: UnionFind[str] = UnionFind(group.members)
    decisions = []
    for first, second in candidate_pairs(group, corpus, config.window_years):
        decision = records_match(corpus.persons[first], corpus.persons[second], corpus, config)
        if config.explain:
            decisions.append(decision)
        if decision.matched:
            uf.union(first, second)

    sets = sorted((RecordSet.of(members) for members in uf.groups()), key=lambda s: s.set_id)
    logger.debug(f"Group {group.key}: {len(group)} record(s) -> {len(sets)} set(s)")
    return sets, decisions


def cluster_group(group: IndexGroup, corpus: Corpus, config: MatchConfig) -> List[RecordSet]:
    """Connected components of the match graph restricted to one index group."""
    sets, _ = link_group(group, corpus, config)
    return sets


def link_corpus(corpus: Corpus, config: MatchConfig, jobs: int = 1) -> LinkageResult:
    """
    Index the corpus and cluster every group, on ``jobs`` worker threads.

    Groups never interact, and results are put in canonical order after
    collection, so the worker count cannot change the output.
    """
    groups = build_index(corpus, config)
    result = LinkageResult(groups=groups)

    if jobs <= 1 or len(groups) <= 1:
        outcomes = [link_group(group, corpus, config) for group in groups]
    else:
        logger.info(f"Clustering {len(groups)} groups with {jobs} workers")
        outcomes = []
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            futures = {executor.submit(link_group, group, corpus, config): group for group in groups}
            for future in as_completed(futures):
                outcomes.append(future.result())

    for sets, decisions in outcomes:
        result.sets.extend(sets)
        result.decisions.extend(decisions)
    result.sets.sort(key=lambda s: s.set_id)
    result.decisions.sort(key=lambda d: (d.record_a, d.record_b))

    logger.info(f"Clustered {len(corpus)} record(s) into {len(result.sets)} set(s)")
    return result


def cluster_corpus(corpus: Corpus, config: MatchConfig, jobs: int = 1) -> List[RecordSet]:
    """All record sets of the corpus, ordered by set_id."""
    return link_corpus(corpus, config, jobs=jobs).sets


def find_veto_conflicts(sets: List[RecordSet], corpus: Corpus, config: MatchConfig) -> List[VetoConflict]:
    """
    Member pairs joined only through other members despite a role veto.

    Within a set, the member whose role ranks higher in the role hierarchy
    is reported as ``record_a``.
    """
    ruleset = active_ruleset(config)
    conflicts = []
    for record_set in sets:
        if len(record_set) < 2:
            continue
        for first, second in combinations(record_set.members, 2):
            a, b = corpus.persons[first], corpus.persons[second]
            rule_id = evaluate_rules(a, b, corpus.events, ruleset)
            if rule_id is None:
                continue
            if (ruleset.rank(b.role), b.record_id) < (ruleset.rank(a.role), a.record_id):
                a, b = b, a
            conflicts.append(VetoConflict(record_set.set_id, a.record_id, b.record_id, rule_id))

    conflicts.sort(key=lambda c: (
        c.set_id, ruleset.rank(corpus.persons[c.record_a].role), c.record_a, c.record_b
    ))
    if conflicts:
        logger.warning(f"{len(conflicts)} vetoed pair(s) ended up in the same set through linking records")
    return conflicts
