from collections import defaultdict

import pytest

from historical_record_linker.cluster import cluster_corpus
from historical_record_linker.corpus_io import load_corpus, load_truth
from historical_record_linker.errors import GenParamsError
from historical_record_linker.evaluation import score
from historical_record_linker.generator import CorpusBuilder, GenParams, generate_corpus, synthesize
from historical_record_linker.matcher import time_within
from historical_record_linker.model import MatchConfig


@pytest.fixture(scope="module")
def clean_files(tmp_path_factory):
    out = tmp_path_factory.mktemp("clean")
    return generate_corpus(GenParams(n_individuals=400, seed=3, generations=1, max_span_years=5), out)


def test_same_seed_gives_identical_bytes(tmp_path):
    params = GenParams(n_individuals=200, typo_rate=0.1, location_alias_rate=0.3,
                       date_jitter_years=2, duplicate_name_rate=0.5, seed=99)
    first = generate_corpus(params, tmp_path / "a")
    second = generate_corpus(params, tmp_path / "b")
    for name in ("events", "persons", "truth", "aliases"):
        assert getattr(first, name).read_bytes() == getattr(second, name).read_bytes()


def test_different_seeds_differ(tmp_path):
    first = generate_corpus(GenParams(n_individuals=100, seed=1), tmp_path / "a")
    second = generate_corpus(GenParams(n_individuals=100, seed=2), tmp_path / "b")
    assert first.persons.read_bytes() != second.persons.read_bytes()


def test_generated_files_load_cleanly(clean_files):
    corpus, report = load_corpus(clean_files.events, clean_files.persons, aliases=clean_files.aliases)
    truth = load_truth(clean_files.truth)
    assert report.quarantined == []
    assert set(truth.individual_of) == set(corpus.persons)
    assert len(set(truth.individual_of.values())) >= 400


def test_corpus_contains_marriage_dyads_baptisms_and_deaths(clean_files):
    corpus, _ = load_corpus(clean_files.events, clean_files.persons)
    kinds = defaultdict(set)
    for event in corpus.events.values():
        kinds[str(event.event_type)].add(tuple(sorted(str(corpus.persons[r].role) for r in event.participants)))
    assert set(kinds) == {"baptism", "marriage", "death"}
    assert all({"husband", "wife"} <= set(roles) for roles in kinds["marriage"])
    assert all({"baptized", "father", "mother"} <= set(roles) for roles in kinds["baptism"])


def test_nobody_appears_after_their_death(clean_files):
    corpus, _ = load_corpus(clean_files.events, clean_files.persons)
    truth = load_truth(clean_files.truth)
    years = defaultdict(list)
    deaths = {}
    for person in corpus.persons.values():
        individual = truth.individual_of[person.record_id]
        year = corpus.event_of(person).date.year
        years[individual].append(year)
        if str(person.role) == "deceased":
            assert individual not in deaths
            deaths[individual] = year
    assert deaths
    for individual, death_year in deaths.items():
        assert max(years[individual]) <= death_year


def test_noise_free_corpus_is_recovered_exactly(clean_files):
    corpus, _ = load_corpus(clean_files.events, clean_files.persons, aliases=clean_files.aliases)
    truth = load_truth(clean_files.truth)
    by_individual = defaultdict(list)
    for record_id, individual in truth.individual_of.items():
        by_individual[individual].append(corpus.event_of(corpus.persons[record_id]).date)
    for dates in by_individual.values():
        assert all(time_within(a, b, 5) for a in dates for b in dates)

    report = score(cluster_corpus(corpus, MatchConfig()), truth, corpus)
    assert report.precision == 1.0
    assert report.recall == 1.0


def test_duplicate_names_plant_father_son_traps():
    corpus = synthesize(GenParams(n_individuals=300, duplicate_name_rate=1.0, seed=4))
    persons = {row[0]: row for row in corpus.persons}
    names_by_individual = {}
    for record_id, individual in corpus.truth.individual_of.items():
        row = persons[record_id]
        names_by_individual[individual] = (row[2], row[3])
    traps = [
        son for son, father in corpus.truth.father_of.items()
        if names_by_individual.get(son) == names_by_individual.get(father)
    ]
    assert traps


def test_typos_change_some_mentions():
    builder = CorpusBuilder(GenParams(n_individuals=300, seed=6, typo_rate=0.5))
    corpus = builder.build()
    changed = 0
    for record_id, event_id, first, last, role in corpus.persons:
        person = builder.individuals[corpus.truth.individual_of[record_id]]
        changed += (first, last) != (person.first_name, person.last_name)
    assert len(corpus.persons) // 10 < changed < len(corpus.persons)


@pytest.mark.parametrize("overrides", [
    {"n_individuals": 0},
    {"typo_rate": 1.5},
    {"location_alias_rate": -0.1},
    {"events_per_individual": (0, 3)},
    {"events_per_individual": (4, 2)},
    {"date_jitter_years": -1},
    {"families": 0},
    {"seed": -1},
    {"generations": 0},
])
def test_infeasible_params_are_rejected(overrides):
    with pytest.raises(GenParamsError):
        GenParams(**overrides)
