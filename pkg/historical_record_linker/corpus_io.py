"""Corpus ingestion, validation and result persistence."""

import json
import logging
from pathlib import Path
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import pandas as pd

from historical_record_linker.cluster import RecordSet, VetoConflict
from historical_record_linker.errors import (
    ConfigError,
    CorpusLoadError,
    DateParseError,
    ResultWriteError,
)
from historical_record_linker.model import (
    Corpus,
    Event,
    EventType,
    GroundTruth,
    MatchDecision,
    PersonRecord,
    Role,
    RoleMap,
)
from historical_record_linker.normalize import (
    AliasTable,
    build_alias_table,
    normalize_location,
    normalize_name,
    normalize_text,
    parse_date,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

EVENT_COLUMNS = ["event_id", "event_type", "date", "location"]
PERSON_COLUMNS = ["record_id", "event_id", "first_name", "last_name", "role"]
ALIAS_COLUMNS = ["alias", "canonical"]
ROLE_MAP_COLUMNS = ["source_label", "canonical_role"]
TRUTH_COLUMNS = ["record_id", "individual_id"]
SET_COLUMNS = ["set_id", "record_id"]
DECISION_COLUMNS = [
    "record_a", "record_b", "matched", "name_score", "date_ok",
    "location_ok", "relationship_support", "role_veto",
]
CONFLICT_COLUMNS = ["set_id", "record_a", "record_b", "rule_id"]

# header line is row 1
FIRST_DATA_ROW = 2


@dataclass(frozen=True)
class QuarantinedRow:
    source: str
    row: int
    reason: str


@dataclass
class IngestReport:
    records_loaded: int = 0
    events_loaded: int = 0
    quarantined: List[QuarantinedRow] = field(default_factory=list)

    def quarantine(self, source: str, row: int, reason: str) -> None:
        self.quarantined.append(QuarantinedRow(source, row, reason))
        logger.warning(f"Quarantined {source} row {row}: {reason}")


def read_table(path: PathLike, columns: Sequence[str]) -> pd.DataFrame:
    """
    Read a UTF-8 CSV as strings, checking the required header columns.

    Raises:
        CorpusLoadError: unreadable file or missing column
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except FileNotFoundError:
        raise CorpusLoadError(str(path), "file not found")
    except pd.errors.EmptyDataError:
        raise CorpusLoadError(str(path), "file is empty; a header row is required")
    except (UnicodeDecodeError, pd.errors.ParserError, OSError) as e:
        raise CorpusLoadError(str(path), f"unreadable CSV: {e}")

    frame.columns = [str(c).strip() for c in frame.columns]
    for column in columns:
        if column not in frame.columns:
            raise CorpusLoadError(str(path), "missing header column", column=column)
    return frame


def _rows(
    frame: pd.DataFrame,
    columns: Sequence[str],
    fill: Optional[str] = "",
) -> Iterable[Tuple[int, Dict[str, Optional[str]]]]:
    """Numbered rows of stripped cells; fields absent from a short line become ``fill``."""
    for offset, values in enumerate(frame[list(columns)].itertuples(index=False, name=None)):
        yield FIRST_DATA_ROW + offset, {
            c: fill if pd.isna(v) else str(v).strip() for c, v in zip(columns, values)
        }


def _missing_fields(row: Dict[str, Optional[str]]) -> Optional[str]:
    missing = [column for column, value in row.items() if value is None]
    return f"missing fields: {', '.join(missing)}" if missing else None


def load_alias_table(path: PathLike) -> AliasTable:
    frame = read_table(path, ALIAS_COLUMNS)
    table = build_alias_table((row["alias"], row["canonical"]) for _, row in _rows(frame, ALIAS_COLUMNS))
    logger.info(f"Loaded {len(table)} location alias(es) from {path}")
    return table


def load_role_map(path: PathLike) -> RoleMap:
    """
    Read a `source_label,canonical_role` mapping file.

    Raises:
        ConfigError: a canonical role that is not a known label
    """
    frame = read_table(path, ROLE_MAP_COLUMNS)
    role_map: RoleMap = {}
    for row_number, row in _rows(frame, ROLE_MAP_COLUMNS):
        role = Role.canonical(row["canonical_role"])
        if role is None:
            raise ConfigError(f"{path} row {row_number}: unknown canonical role '{row['canonical_role']}'")
        role_map[normalize_text(row["source_label"])] = str(role)
    logger.info(f"Loaded {len(role_map)} role mapping(s) from {path}")
    return role_map


def load_corpus(
    events_file: PathLike,
    persons_file: PathLike,
    aliases: Optional[PathLike] = None,
    role_map: Optional[PathLike] = None,
) -> Tuple[Corpus, IngestReport]:
    """
    Load, normalize and validate the two-file corpus.

    Rows with an unparseable date, a missing surname, a duplicate id or a
    dangling event reference are quarantined, not matched. Events left with
    no participants are quarantined too.
    """
    alias_table = load_alias_table(aliases) if aliases else {}
    roles = load_role_map(role_map) if role_map else {}
    events_source, persons_source = Path(events_file).name, Path(persons_file).name

    report = IngestReport()
    event_frame = read_table(events_file, EVENT_COLUMNS)
    person_frame = read_table(persons_file, PERSON_COLUMNS)

    events: Dict[str, Event] = {}
    event_rows: Dict[str, int] = {}
    for row_number, row in _rows(event_frame, EVENT_COLUMNS, fill=None):
        short = _missing_fields(row)
        if short:
            report.quarantine(events_source, row_number, short)
            continue
        event_id = row["event_id"]
        if not event_id:
            report.quarantine(events_source, row_number, "missing event_id")
            continue
        if event_id in events:
            report.quarantine(events_source, row_number, f"duplicate event_id '{event_id}'")
            continue
        try:
            date = parse_date(row["date"])
        except DateParseError as e:
            report.quarantine(events_source, row_number, f"unparseable date: {e}")
            continue
        events[event_id] = Event(
            event_id=event_id,
            event_type=EventType.parse(row["event_type"]),
            date=date,
            location=normalize_location(row["location"], alias_table),
        )
        event_rows[event_id] = row_number

    persons: Dict[str, PersonRecord] = {}
    participants: Dict[str, List[str]] = {}
    for row_number, row in _rows(person_frame, PERSON_COLUMNS, fill=None):
        short = _missing_fields(row)
        if short:
            report.quarantine(persons_source, row_number, short)
            continue
        record_id = row["record_id"]
        if not record_id:
            report.quarantine(persons_source, row_number, "missing record_id")
            continue
        if record_id in persons:
            report.quarantine(persons_source, row_number, f"duplicate record_id '{record_id}'")
            continue
        last_name = normalize_name(row["last_name"])
        if not last_name:
            report.quarantine(persons_source, row_number, "missing surname")
            continue
        if row["event_id"] not in events:
            report.quarantine(persons_source, row_number, "dangling event reference")
            continue
        persons[record_id] = PersonRecord(
            record_id=record_id,
            event_id=row["event_id"],
            first_name=normalize_name(row["first_name"]),
            last_name=last_name,
            role=Role.parse(row["role"], roles),
        )
        participants.setdefault(row["event_id"], []).append(record_id)

    linked: Dict[str, Event] = {}
    for event_id, event in events.items():
        members = participants.get(event_id)
        if not members:
            report.quarantine(events_source, event_rows[event_id], "event has no participants")
            continue
        linked[event_id] = Event(
            event_id=event.event_id,
            event_type=event.event_type,
            date=event.date,
            location=event.location,
            participants=tuple(sorted(members)),
        )

    corpus = Corpus(events=linked, persons=persons)
    problems = corpus.validate()
    if problems:
        raise CorpusLoadError(str(persons_file), f"referential integrity failed: {problems[0]}")

    report.records_loaded = len(persons)
    report.events_loaded = len(linked)
    logger.info(
        f"Loaded {report.records_loaded} record(s) in {report.events_loaded} event(s); "
        f"{len(report.quarantined)} row(s) quarantined"
    )
    return corpus, report


def write_table(rows: List[Sequence], columns: Sequence[str], path: Path) -> Path:
    """Write string rows as a UTF-8 CSV with "\\n" line endings."""
    try:
        pd.DataFrame(rows, columns=list(columns), dtype=str).to_csv(
            path, index=False, lineterminator="\n", encoding="utf-8"
        )
    except OSError as e:
        raise ResultWriteError(str(path), str(e))
    logger.info(f"Saved output to: {path}")
    return path


def ensure_dir(out_dir: PathLike) -> Path:
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ResultWriteError(str(out_dir), str(e))
    return out_dir


def write_corpus(corpus: Corpus, out_dir: PathLike) -> Tuple[Path, Path]:
    """Write events.csv and persons.csv in the ingest format."""
    out_dir = ensure_dir(out_dir)
    event_rows = [
        [e.event_id, str(e.event_type), e.date.isoformat(), e.location]
        for e in sorted(corpus.events.values(), key=lambda e: e.event_id)
    ]
    person_rows = [
        [p.record_id, p.event_id, p.first_name, p.last_name, str(p.role)]
        for p in sorted(corpus.persons.values(), key=lambda p: p.record_id)
    ]
    return (
        write_table(event_rows, EVENT_COLUMNS, out_dir / "events.csv"),
        write_table(person_rows, PERSON_COLUMNS, out_dir / "persons.csv"),
    )


def _flag(value: Optional[bool]) -> str:
    if value is None:
        return ""
    return "true" if value else "false"


def decision_row(decision: MatchDecision) -> List[str]:
    return [
        decision.record_a,
        decision.record_b,
        _flag(decision.matched),
        "" if decision.name_score is None else f"{decision.name_score:.6f}",
        _flag(decision.date_ok),
        _flag(decision.location_ok),
        "" if decision.relationship_support is None else str(decision.relationship_support),
        decision.role_veto or "",
    ]


def _set_payload(record_set: RecordSet, corpus: Corpus) -> Dict:
    members = []
    for record_id in record_set.members:
        person = corpus.persons[record_id]
        event = corpus.events[person.event_id]
        members.append({
            "record_id": record_id,
            "event_id": event.event_id,
            "event_type": str(event.event_type),
            "date": event.date.isoformat(),
            "location": event.location,
            "first_name": person.first_name,
            "last_name": person.last_name,
            "role": str(person.role),
        })
    return {"set_id": record_set.set_id, "size": len(record_set), "members": members}


def write_results(
    sets: List[RecordSet],
    corpus: Corpus,
    out_dir: PathLike,
    decisions: Optional[List[MatchDecision]] = None,
    conflicts: Optional[List[VetoConflict]] = None,
) -> List[Path]:
    """
    Persist record sets, and in explain mode decisions and veto conflicts.

    Output is byte-deterministic for identical inputs. Returns the written
    file manifest.
    """
    out_dir = ensure_dir(out_dir)
    ordered = sorted(sets, key=lambda s: s.set_id)
    written = [
        write_table(
            [[s.set_id, rid] for s in ordered for rid in s.members], SET_COLUMNS, out_dir / "sets.csv"
        )
    ]

    json_path = out_dir / "sets.json"
    payload = {"sets": [_set_payload(s, corpus) for s in ordered]}
    try:
        json_path.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    except OSError as e:
        raise ResultWriteError(str(json_path), str(e))
    logger.info(f"Saved output to: {json_path}")
    written.append(json_path)

    if decisions is not None:
        rows = [decision_row(d) for d in sorted(decisions, key=lambda d: (d.record_a, d.record_b))]
        written.append(write_table(rows, DECISION_COLUMNS, out_dir / "decisions.csv"))
    if conflicts is not None:
        rows = [[c.set_id, c.record_a, c.record_b, c.rule_id] for c in conflicts]
        written.append(write_table(rows, CONFLICT_COLUMNS, out_dir / "conflicts.csv"))
    return written


def load_sets(path: PathLike) -> List[RecordSet]:
    """Read record sets back from a sets.csv file."""
    frame = read_table(path, SET_COLUMNS)
    members: Dict[str, List[str]] = {}
    for _, row in _rows(frame, SET_COLUMNS):
        members.setdefault(row["set_id"], []).append(row["record_id"])
    return sorted((RecordSet.of(m) for m in members.values()), key=lambda s: s.set_id)


def load_truth(path: PathLike) -> GroundTruth:
    """Read truth.csv; the optional `father_id` column links individuals to fathers."""
    frame = read_table(path, TRUTH_COLUMNS).fillna("")
    individual_of = dict(zip(frame["record_id"].str.strip(), frame["individual_id"].str.strip()))
    father_of: Dict[str, str] = {}
    if "father_id" in frame.columns:
        for individual, father in zip(frame["individual_id"].str.strip(), frame["father_id"].str.strip()):
            if father:
                father_of[individual] = father
    logger.info(f"Loaded truth for {len(individual_of)} record(s) from {path}")
    return GroundTruth(individual_of=individual_of, father_of=father_of)


def write_truth(truth: GroundTruth, path: PathLike) -> Path:
    path = Path(path)
    ensure_dir(path.parent)
    rows = [
        [rid, ind, truth.father_of.get(ind, "")]
        for rid, ind in sorted(truth.individual_of.items())
    ]
    return write_table(rows, TRUTH_COLUMNS + ["father_id"], path)
