import random
from itertools import combinations

import pytest

from conftest import build_corpus
from historical_record_linker.errors import SameEventError
from historical_record_linker.matcher import (
    location_match,
    name_score,
    records_match,
    relationship_support,
    time_within,
)
from historical_record_linker.metrics import jaro_winkler, normalized_damerau_similarity
from historical_record_linker.model import MatchConfig
from historical_record_linker.normalize import EventDate
from historical_record_linker.rules import EMPTY_RULESET


@pytest.mark.parametrize("a, b, window, expected", [
    (1847, 1848, 5, True),
    (1848, 1870, 5, False),
    (1850, 1855, 5, True),
    (1855, 1850, 5, True),
    (1850, 1856, 5, False),
    (1850, 1850, 0, True),
])
def test_time_within(a, b, window, expected):
    assert time_within(EventDate(a), EventDate(b), window) is expected


def test_time_within_ignores_month_and_day():
    assert time_within(EventDate(1850, 1, 1), EventDate(1855, 12, 31), 5)


def test_location_match():
    config = MatchConfig()
    assert location_match("rapids church", "grand rapids church", config)
    assert location_match("st boniface", "st boniface", config)
    assert normalized_damerau_similarity("st boniface", "grand rapids church") < 0.80
    assert not location_match("st boniface", "grand rapids church", config)
    assert location_match("st bonifase", "st boniface", config)


def test_missing_location_follows_flag():
    assert location_match("", "batoche", MatchConfig())
    assert not location_match("", "batoche", MatchConfig(missing_location_matches=False))


def test_relationship_support_counts_shared_names(dyad_corpus):
    persons = dyad_corpus.persons
    assert relationship_support(persons["r1"], persons["r3"], dyad_corpus) == 2
    assert relationship_support(persons["r3"], persons["r1"], dyad_corpus) == 2


def test_relationship_support_with_only_candidates_shared():
    events = [("e1", "baptism", "1850", "x"), ("e2", "baptism", "1851", "x")]
    persons = [
        ("r1", "e1", "John", "Setter", "father"),
        ("r2", "e1", "Anne", "Bird", "mother"),
        ("r3", "e2", "John", "Setter", "father"),
        ("r4", "e2", "Sarah", "Cook", "mother"),
    ]
    corpus = build_corpus(events, persons)
    assert relationship_support(corpus.persons["r1"], corpus.persons["r3"], corpus) == 1


def test_relationship_support_with_both_parents_shared():
    events = [("e1", "marriage", "1850", "x"), ("e2", "baptism", "1851", "x")]
    persons = [
        ("r1", "e1", "Adolphe", "Desroches", "husband"),
        ("r2", "e1", "Jean", "Desroches", "father"),
        ("r3", "e1", "Marie", "Gladu", "mother"),
        ("r4", "e2", "Adolphe", "Desroches", "godparent"),
        ("r5", "e2", "Jean", "Desroches", "father"),
        ("r6", "e2", "Marie", "Gladu", "mother"),
        ("r7", "e2", "Louis", "Desroches", "baptized"),
    ]
    corpus = build_corpus(events, persons)
    assert relationship_support(corpus.persons["r1"], corpus.persons["r4"], corpus) == 3


def test_relationship_support_rejects_same_event(allery_corpus):
    with pytest.raises(SameEventError):
        relationship_support(allery_corpus.persons["r1"], allery_corpus.persons["r3"], allery_corpus)


def test_setter_matches_within_window(setter_corpus):
    persons = setter_corpus.persons
    config = MatchConfig()
    assert records_match(persons["r1"], persons["r2"], setter_corpus, config).matched
    decision = records_match(persons["r2"], persons["r3"], setter_corpus, config)
    assert not decision.matched
    assert decision.date_ok is False
    assert decision.name_score is None


def test_deceased_vetoes_later_record(deceased_corpus):
    decision = records_match(
        deceased_corpus.persons["r1"], deceased_corpus.persons["r2"], deceased_corpus, MatchConfig()
    )
    assert not decision.matched
    assert decision.role_veto == "R2"


def test_same_event_mentions_are_vetoed(allery_corpus):
    decision = records_match(
        allery_corpus.persons["r1"], allery_corpus.persons["r3"], allery_corpus, MatchConfig(explain=True)
    )
    assert not decision.matched
    assert decision.role_veto == "R1"
    assert decision.relationship_support is None


def test_explain_mode_records_every_evidence_field(setter_corpus):
    persons = setter_corpus.persons
    decision = records_match(persons["r1"], persons["r3"], setter_corpus, MatchConfig(explain=True))
    assert not decision.matched
    assert decision.date_ok is False
    assert decision.name_score == 1.0
    assert decision.location_ok is True
    assert decision.role_veto is None
    assert decision.relationship_support == 1


def test_relationship_requirement(dyad_corpus, setter_corpus):
    required = MatchConfig(relationship_required=True)
    dyad = dyad_corpus.persons
    assert records_match(dyad["r1"], dyad["r3"], dyad_corpus, required).matched
    setter = setter_corpus.persons
    decision = records_match(setter["r1"], setter["r2"], setter_corpus, required)
    assert not decision.matched
    assert decision.relationship_support == 1
    assert records_match(setter["r1"], setter["r2"], setter_corpus, required.with_overrides(
        min_relationship_support=1)).matched


def test_missing_first_name_scores_surname_with_penalty():
    events = [("e1", "baptism", "1850", "x"), ("e2", "baptism", "1851", "x")]
    persons = [("r1", "e1", "", "Setter", "father"), ("r2", "e2", "John", "Setter", "father")]
    corpus = build_corpus(events, persons)
    score = name_score(corpus.persons["r1"], corpus.persons["r2"], MatchConfig())
    assert score == pytest.approx(0.9)
    assert not records_match(corpus.persons["r1"], corpus.persons["r2"], corpus, MatchConfig()).matched


def test_matching_itself_is_an_error(setter_corpus):
    with pytest.raises(ValueError):
        records_match(setter_corpus.persons["r1"], setter_corpus.persons["r1"], setter_corpus, MatchConfig())


NAMES = [("John", "Setter"), ("Jon", "Setter"), ("John", "Settee"), ("Marie", "Lepine"), ("", "Setter")]
LOCATIONS = ["St Andrews Church", "St Andrew Church", "Batoche", "", "Grand Rapids Church", "Rapids Church"]
ROLES = ["father", "witness", "godparent", "deceased", "husband", "baptized", "mother"]


def random_corpus(rng, n_events=6, n_persons=14):
    events = [
        (f"e{i}", rng.choice(["baptism", "marriage", "death"]), str(rng.randint(1840, 1856)), rng.choice(LOCATIONS))
        for i in range(n_events)
    ]
    persons = [
        (f"r{i:02d}", f"e{rng.randrange(n_events)}", *rng.choice(NAMES), rng.choice(ROLES))
        for i in range(n_persons)
    ]
    return build_corpus(events, persons)


def three_conjuncts(a, b, corpus, config):
    ea, eb = corpus.event_of(a), corpus.event_of(b)
    if a.name_key == b.name_key:
        score = 1.0
    elif bool(a.first_name) != bool(b.first_name):
        score = jaro_winkler(a.last_name, b.last_name) * 0.9
    else:
        score = jaro_winkler(a.full_name, b.full_name)
    return (
        score >= config.name_threshold
        and abs(ea.date.year - eb.date.year) <= config.window_years
        and location_match(ea.location, eb.location, config)
    )


def test_predicate_is_symmetric_monotone_and_reduces_without_rules():
    rng = random.Random(23)
    for _ in range(60):
        corpus = random_corpus(rng)
        records = sorted(corpus.persons.values(), key=lambda p: p.record_id)
        for a, b in combinations(records, 2):
            for config in (MatchConfig(), MatchConfig(relationship_required=True, min_relationship_support=1)):
                forward = records_match(a, b, corpus, config)
                assert forward.matched == records_match(b, a, corpus, config).matched
                assert forward.matched == records_match(a, b, corpus, config.with_overrides(explain=True)).matched
                if forward.matched:
                    wider = config.with_overrides(window_years=config.window_years + 7)
                    assert records_match(a, b, corpus, wider).matched
            plain = MatchConfig(role_rules=EMPTY_RULESET)
            assert records_match(a, b, corpus, plain).matched == three_conjuncts(a, b, corpus, plain)
