"""Pairwise match predicate: name, date, location, role rules and relationships."""

import logging
from typing import Optional

from historical_record_linker.errors import SameEventError
from historical_record_linker.metrics import NAME_METRICS, normalized_damerau_similarity
from historical_record_linker.model import Corpus, MatchConfig, MatchDecision, PersonRecord
from historical_record_linker.normalize import EventDate
from historical_record_linker.rules import RoleRuleSet, default_ruleset, evaluate_rules

logger = logging.getLogger(__name__)


def time_within(a: EventDate, b: EventDate, window_years: int) -> bool:
    """Inclusive year-granularity window; month and day are ignored."""
    return abs(a.year - b.year) <= window_years


def location_match(a: str, b: str, config: MatchConfig) -> bool:
    """
    Missing location passes when configured; otherwise substring containment,
    then normalized Damerau (OSA) similarity against the location threshold.
    """
    if not a or not b:
        return config.missing_location_matches
    if a in b or b in a:
        return True
    return normalized_damerau_similarity(a, b) >= config.location_threshold


def relationship_support(a: PersonRecord, b: PersonRecord, corpus: Corpus) -> int:
    """
    Number of normalized names shared by the two events' participants,
    the candidates themselves included.

    Raises:
        SameEventError: when both mentions come from one event
    """
    if a.event_id == b.event_id:
        raise SameEventError(
            f"Records '{a.record_id}' and '{b.record_id}' share event '{a.event_id}'"
        )
    return len(corpus.event_names(a.event_id) & corpus.event_names(b.event_id))


def name_score(a: PersonRecord, b: PersonRecord, config: MatchConfig) -> float:
    """
    Configured metric over "first last". When exactly one side lacks a first
    name, surnames alone are compared and the score is penalized.
    """
    if a.name_key == b.name_key:
        return 1.0
    metric = NAME_METRICS[config.name_metric]
    if bool(a.first_name) != bool(b.first_name):
        return metric(a.last_name, b.last_name) * config.missing_first_name_penalty
    return metric(a.full_name, b.full_name)


def active_ruleset(config: MatchConfig) -> RoleRuleSet:
    return config.role_rules if config.role_rules is not None else default_ruleset()


def records_match(
    a: PersonRecord,
    b: PersonRecord,
    corpus: Corpus,
    config: MatchConfig,
) -> MatchDecision:
    """
    Decide whether two mentions refer to the same individual.

    matched = name ok AND date ok AND location ok AND no role veto AND
    (relationship support reaches the minimum, when required). In explain
    mode every evidence field is computed; otherwise evaluation stops at the
    first failing criterion and later fields stay None.
    """
    if a.record_id == b.record_id:
        raise ValueError(f"Cannot match record '{a.record_id}' with itself")

    explain = config.explain
    event_a, event_b = corpus.events[a.event_id], corpus.events[b.event_id]
    evidence = {}

    def verdict(matched: bool) -> MatchDecision:
        return MatchDecision(record_a=a.record_id, record_b=b.record_id, matched=matched, **evidence)

    ok = True

    evidence["date_ok"] = time_within(event_a.date, event_b.date, config.window_years)
    ok = ok and evidence["date_ok"]
    if not ok and not explain:
        return verdict(False)

    evidence["name_score"] = name_score(a, b, config)
    ok = ok and evidence["name_score"] >= config.name_threshold
    if not ok and not explain:
        return verdict(False)

    evidence["location_ok"] = location_match(event_a.location, event_b.location, config)
    ok = ok and evidence["location_ok"]
    if not ok and not explain:
        return verdict(False)

    veto: Optional[str] = evaluate_rules(a, b, corpus.events, active_ruleset(config))
    evidence["role_veto"] = veto
    ok = ok and veto is None
    if not ok and not explain:
        return verdict(False)

    if a.event_id != b.event_id and (explain or config.relationship_required):
        evidence["relationship_support"] = relationship_support(a, b, corpus)
    if config.relationship_required:
        support = evidence.get("relationship_support", 0)
        ok = ok and support >= config.min_relationship_support

    return verdict(ok)
