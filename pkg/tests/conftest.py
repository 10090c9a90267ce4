import pytest

from historical_record_linker.corpus_io import EVENT_COLUMNS, PERSON_COLUMNS, write_table
from historical_record_linker.model import Corpus, Event, EventType, PersonRecord, Role
from historical_record_linker.normalize import normalize_location, normalize_name, parse_date


def build_corpus(events, persons, aliases=None):
    """
    Corpus from plain tuples.

    events: (event_id, event_type, date, location)
    persons: (record_id, event_id, first_name, last_name, role)
    """
    participants = {}
    for record_id, event_id, *_ in persons:
        participants.setdefault(event_id, []).append(record_id)
    built_events = {
        event_id: Event(
            event_id=event_id,
            event_type=EventType.parse(kind),
            date=parse_date(date),
            location=normalize_location(location, aliases),
            participants=tuple(sorted(participants.get(event_id, []))),
        )
        for event_id, kind, date, location in events
    }
    built_persons = {
        record_id: PersonRecord(
            record_id=record_id,
            event_id=event_id,
            first_name=normalize_name(first),
            last_name=normalize_name(last),
            role=Role.parse(role),
        )
        for record_id, event_id, first, last, role in persons
    }
    return Corpus(events=built_events, persons=built_persons)


def write_corpus_files(directory, events, persons):
    events_file = write_table([list(e) for e in events], EVENT_COLUMNS, directory / "events.csv")
    persons_file = write_table([list(p) for p in persons], PERSON_COLUMNS, directory / "persons.csv")
    return events_file, persons_file


@pytest.fixture
def setter_corpus():
    """John Setter in 1847, 1848 and 1870 at the same church."""
    events = [
        ("e1", "baptism", "1847", "St Andrews Church"),
        ("e2", "baptism", "1848", "St Andrews Church"),
        ("e3", "baptism", "1870", "St Andrews Church"),
    ]
    persons = [
        ("r1", "e1", "John", "Setter", "father"),
        ("r2", "e2", "John", "Setter", "father"),
        ("r3", "e3", "John", "Setter", "father"),
    ]
    return build_corpus(events, persons)


@pytest.fixture
def dyad_corpus():
    """Adolphe Desroches and Elizabeth Langdon at their marriage and at a baptism."""
    events = [
        ("e1", "marriage", "1850-06-02", "Grand Rapids Church"),
        ("e2", "baptism", "1852-03-14", "Rapids Church"),
    ]
    persons = [
        ("r1", "e1", "Adolphe", "Desroches", "husband"),
        ("r2", "e1", "Elizabeth", "Langdon", "wife"),
        ("r3", "e2", "Adolphe", "Desroches", "father"),
        ("r4", "e2", "Elizabeth", "Langdon", "mother"),
        ("r5", "e2", "Louis", "Desroches", "baptized"),
    ]
    return build_corpus(events, persons)


@pytest.fixture
def allery_corpus():
    """Joseph Allery marries; his father Joseph Allery attends."""
    events = [("e1", "marriage", "1861", "St Boniface")]
    persons = [
        ("r1", "e1", "Joseph", "Allery", "husband"),
        ("r2", "e1", "Angelique", "Dumont", "wife"),
        ("r3", "e1", "Joseph", "Allery", "father"),
    ]
    return build_corpus(events, persons)


@pytest.fixture
def deceased_corpus():
    events = [
        ("e1", "death", "1870", "Batoche"),
        ("e2", "baptism", "1875", "Batoche"),
    ]
    persons = [
        ("r1", "e1", "Marie", "Lepine", "deceased"),
        ("r2", "e2", "Marie", "Lepine", "godparent"),
    ]
    return build_corpus(events, persons)
