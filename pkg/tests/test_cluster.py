import random
from itertools import combinations

from conftest import build_corpus
from historical_record_linker.cluster import (
    RecordSet,
    cluster_corpus,
    cluster_group,
    find_veto_conflicts,
    link_corpus,
)
from historical_record_linker.indexer import IndexGroup, build_index
from historical_record_linker.matcher import records_match
from historical_record_linker.model import MatchConfig

NAMES = [("John", "Setter"), ("Marie", "Lepine"), ("Pierre", "Dumas"), ("Angelique", "Beauchemin")]
LOCATIONS = ["St Boniface", "Grand Rapids Church", "Rapids Church", "Batoche", ""]
ROLES = ["husband", "wife", "father", "mother", "baptized", "deceased", "witness", "godparent"]


def random_corpus(rng):
    n_events = rng.randint(1, 15)
    events = [
        (f"e{i:02d}", rng.choice(["baptism", "marriage", "death"]), str(rng.randint(1840, 1860)),
         rng.choice(LOCATIONS))
        for i in range(n_events)
    ]
    persons = [
        (f"r{i:02d}", f"e{rng.randrange(n_events):02d}", *rng.choice(NAMES), rng.choice(ROLES))
        for i in range(rng.randint(0, 50))
    ]
    return build_corpus(events, persons)


def brute_force_components(corpus, config):
    """Transitive closure over the full pairwise match matrix."""
    ids = sorted(corpus.persons)
    neighbours = {rid: set() for rid in ids}
    for a, b in combinations(ids, 2):
        if records_match(corpus.persons[a], corpus.persons[b], corpus, config).matched:
            neighbours[a].add(b)
            neighbours[b].add(a)
    seen, components = set(), set()
    for start in ids:
        if start in seen:
            continue
        stack, component = [start], set()
        while stack:
            node = stack.pop()
            if node in component:
                continue
            component.add(node)
            stack.extend(neighbours[node] - component)
        seen |= component
        components.add(frozenset(component))
    return components


def test_clusters_equal_brute_force_transitive_closure():
    rng = random.Random(2024)
    for trial in range(1000):
        corpus = random_corpus(rng)
        config = MatchConfig(
            window_years=rng.choice([0, 2, 5, 10]),
            relationship_required=rng.random() < 0.2,
            min_relationship_support=1,
        )
        sets = cluster_corpus(corpus, config)
        assert {frozenset(s.members) for s in sets} == brute_force_components(corpus, config), trial
        assert [s.set_id for s in sets] == sorted(s.set_id for s in sets)
        assert all(s.set_id == s.members[0] for s in sets)


def test_transitive_chain_joins_records_that_do_not_match_directly():
    events = [
        ("e1", "baptism", "1850", "St Boniface"),
        ("e2", "baptism", "1854", "St Boniface"),
        ("e3", "baptism", "1858", "St Boniface"),
    ]
    persons = [(f"r{i}", f"e{i}", "John", "Setter", "father") for i in (1, 2, 3)]
    corpus = build_corpus(events, persons)
    config = MatchConfig()
    assert not records_match(corpus.persons["r1"], corpus.persons["r3"], corpus, config).matched
    assert cluster_corpus(corpus, config) == [RecordSet("r1", ("r1", "r2", "r3"))]


def test_single_record_group_is_a_singleton(setter_corpus):
    group = IndexGroup(key=("john", "setter"), members=("r1",))
    assert cluster_group(group, setter_corpus, MatchConfig()) == [RecordSet("r1", ("r1",))]


def test_setter_window_split(setter_corpus):
    assert cluster_corpus(setter_corpus, MatchConfig()) == [
        RecordSet("r1", ("r1", "r2")),
        RecordSet("r3", ("r3",)),
    ]


def test_empty_corpus_has_no_sets():
    assert cluster_corpus(build_corpus([], []), MatchConfig()) == []


def test_dyad_members_cluster_separately():
    events = [("e1", "marriage", "1850", "Batoche"), ("e2", "marriage", "1851", "Batoche")]
    persons = [
        ("r1", "e1", "Adolphe", "Desroches", "witness"),
        ("r2", "e1", "Elizabeth", "Langdon", "witness"),
        ("r3", "e2", "Adolphe", "Desroches", "witness"),
        ("r4", "e2", "Elizabeth", "Langdon", "witness"),
    ]
    sets = cluster_corpus(build_corpus(events, persons), MatchConfig())
    assert sets == [RecordSet("r1", ("r1", "r3")), RecordSet("r2", ("r2", "r4"))]


def test_same_event_mentions_never_merge(allery_corpus):
    sets = cluster_corpus(allery_corpus, MatchConfig())
    assert {s.members for s in sets} == {("r1",), ("r2",), ("r3",)}


def test_output_is_independent_of_input_order_and_jobs():
    rng = random.Random(8)
    for _ in range(30):
        corpus = random_corpus(rng)
        expected = cluster_corpus(corpus, MatchConfig())
        shuffled_ids = list(corpus.persons)
        rng.shuffle(shuffled_ids)
        shuffled = type(corpus)(events=corpus.events, persons={rid: corpus.persons[rid] for rid in shuffled_ids})
        assert cluster_corpus(shuffled, MatchConfig()) == expected
        assert cluster_corpus(corpus, MatchConfig(), jobs=4) == expected


def test_sets_never_span_index_groups():
    rng = random.Random(12)
    for _ in range(30):
        corpus = random_corpus(rng)
        group_of = {rid: g.key for g in build_index(corpus, MatchConfig()) for rid in g.members}
        for record_set in cluster_corpus(corpus, MatchConfig()):
            assert len({group_of[rid] for rid in record_set.members}) == 1


def test_explain_keeps_windowed_decisions(setter_corpus):
    result = link_corpus(setter_corpus, MatchConfig(explain=True))
    assert [(d.record_a, d.record_b, d.matched) for d in result.decisions] == [("r1", "r2", True)]
    assert result.matched_pairs == 1
    assert link_corpus(setter_corpus, MatchConfig()).decisions == []


def test_veto_conflicts_surface_chained_sets():
    events = [
        ("e1", "death", "1850", "Batoche"),
        ("e2", "baptism", "1849", "Batoche"),
        ("e3", "baptism", "1853", "Batoche"),
    ]
    persons = [
        ("r1", "e1", "Marie", "Lepine", "deceased"),
        ("r2", "e2", "Marie", "Lepine", "godparent"),
        ("r3", "e3", "Marie", "Lepine", "godparent"),
    ]
    corpus = build_corpus(events, persons)
    config = MatchConfig()
    sets = cluster_corpus(corpus, config)
    assert sets == [RecordSet("r1", ("r1", "r2", "r3"))]
    conflicts = find_veto_conflicts(sets, corpus, config)
    assert [(c.set_id, c.record_a, c.record_b, c.rule_id) for c in conflicts] == [("r1", "r1", "r3", "R2")]
