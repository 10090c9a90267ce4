"""Core domain types shared by all pipeline stages."""

import logging
from enum import Enum
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Any, Dict, FrozenSet, List, Mapping, Optional, Tuple

from historical_record_linker.errors import ConfigError
from historical_record_linker.metrics import NAME_METRICS
from historical_record_linker.normalize import EventDate, NormalizedText, normalize_text

if TYPE_CHECKING:
    from historical_record_linker.rules import RoleRuleSet

logger = logging.getLogger(__name__)

OTHER_PREFIX = "other:"

NameKey = Tuple[str, str]
RoleMap = Dict[str, str]


class RoleKind(str, Enum):
    HUSBAND = "husband"
    WIFE = "wife"
    BRIDE = "bride"
    GROOM = "groom"
    FATHER = "father"
    MOTHER = "mother"
    CHILD = "child"
    BAPTIZED = "baptized"
    DECEASED = "deceased"
    WITNESS = "witness"
    GODPARENT = "godparent"
    CLERGY = "clergy"
    OTHER = "other"


class EventKind(str, Enum):
    BAPTISM = "baptism"
    MARRIAGE = "marriage"
    DEATH = "death"
    CENSUS = "census"
    OTHER = "other"


_ROLE_VALUES = {k.value for k in RoleKind if k is not RoleKind.OTHER}
_EVENT_VALUES = {k.value for k in EventKind if k is not EventKind.OTHER}

EVENT_SYNONYMS = {
    "burial": EventKind.DEATH,
    "birth": EventKind.BAPTISM,
    "christening": EventKind.BAPTISM,
}


def _split_other(raw: str) -> Optional[str]:
    text = raw.strip()
    if text.lower().startswith(OTHER_PREFIX):
        return normalize_text(text[len(OTHER_PREFIX):])
    return None


@dataclass(frozen=True)
class Role:
    """A person's function within an event; ``label`` is set only for OTHER."""

    kind: RoleKind
    label: str = ""

    def __post_init__(self):
        if self.kind is RoleKind.OTHER and not self.label:
            raise ValueError("Role 'other' requires a non-empty label")

    @classmethod
    def canonical(cls, raw: str) -> Optional["Role"]:
        """Parse a canonical label ("father", "other:first witness"); None if unknown."""
        other = _split_other(raw)
        if other is not None:
            return cls(RoleKind.OTHER, other) if other else None
        value = normalize_text(raw)
        if value in _ROLE_VALUES:
            return cls(RoleKind(value))
        return None

    @classmethod
    def parse(cls, raw: str, role_map: Optional[RoleMap] = None) -> "Role":
        """Parse a source label, applying the role map; unknown labels become other(label)."""
        value = normalize_text(raw)
        if role_map and value in role_map:
            return cls.canonical(role_map[value]) or cls(RoleKind.OTHER, value)
        known = cls.canonical(raw)
        if known is not None:
            return known
        return cls(RoleKind.OTHER, value or "unknown")

    def __str__(self) -> str:
        if self.kind is RoleKind.OTHER:
            return f"{OTHER_PREFIX}{self.label}"
        return self.kind.value


@dataclass(frozen=True)
class EventType:
    kind: EventKind
    label: str = ""

    def __post_init__(self):
        if self.kind is EventKind.OTHER and not self.label:
            raise ValueError("Event type 'other' requires a non-empty label")

    @classmethod
    def parse(cls, raw: str) -> "EventType":
        other = _split_other(raw)
        if other:
            return cls(EventKind.OTHER, other)
        value = normalize_text(raw)
        if value in EVENT_SYNONYMS:
            return cls(EVENT_SYNONYMS[value])
        if value in _EVENT_VALUES:
            return cls(EventKind(value))
        return cls(EventKind.OTHER, value or "unknown")

    def __str__(self) -> str:
        if self.kind is EventKind.OTHER:
            return f"{OTHER_PREFIX}{self.label}"
        return self.kind.value


@dataclass(frozen=True)
class PersonRecord:
    """One person mention inside one event record."""

    record_id: str
    event_id: str
    first_name: NormalizedText
    last_name: NormalizedText
    role: Role

    @property
    def name_key(self) -> NameKey:
        return (self.first_name, self.last_name)

    @property
    def full_name(self) -> str:
        return f"{self.first_name} {self.last_name}".strip()


@dataclass(frozen=True)
class Event:
    """A source record: a dated, located event with its participants."""

    event_id: str
    event_type: EventType
    date: EventDate
    location: NormalizedText
    participants: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Corpus:
    """
    Validated events and person mentions.

    Immutable after load; per-event name sets are precomputed for the
    relationship-support intersection.
    """

    events: Mapping[str, Event] = field(default_factory=dict)
    persons: Mapping[str, PersonRecord] = field(default_factory=dict)
    _event_names: Mapping[str, FrozenSet[NameKey]] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self):
        names: Dict[str, set] = {event_id: set() for event_id in self.events}
        for person in self.persons.values():
            names.setdefault(person.event_id, set()).add(person.name_key)
        object.__setattr__(
            self, "_event_names", {k: frozenset(v) for k, v in names.items()}
        )

    def __len__(self) -> int:
        return len(self.persons)

    def event_of(self, record: PersonRecord) -> Event:
        return self.events[record.event_id]

    def event_names(self, event_id: str) -> FrozenSet[NameKey]:
        return self._event_names.get(event_id, frozenset())

    def validate(self) -> List[str]:
        """Referential-integrity problems, empty when the corpus is consistent."""
        problems = []
        for record_id, person in self.persons.items():
            if record_id != person.record_id:
                problems.append(f"record '{record_id}' stored under a different id")
            event = self.events.get(person.event_id)
            if event is None:
                problems.append(f"record '{record_id}' references unknown event '{person.event_id}'")
            elif record_id not in event.participants:
                problems.append(f"record '{record_id}' missing from participants of '{event.event_id}'")
            if not person.last_name:
                problems.append(f"record '{record_id}' has no surname")
        for event_id, event in self.events.items():
            if not event.participants:
                problems.append(f"event '{event_id}' has no participants")
            for record_id in event.participants:
                person = self.persons.get(record_id)
                if person is None or person.event_id != event_id:
                    problems.append(f"event '{event_id}' lists unresolved participant '{record_id}'")
        return problems


@dataclass(frozen=True)
class MatchConfig:
    """Thresholds, time window, rule toggles and the role ruleset."""

    name_metric: str = "jaro_winkler"
    name_threshold: float = 0.92
    location_threshold: float = 0.80
    window_years: int = 5
    min_relationship_support: int = 2
    relationship_required: bool = False
    role_rules: Optional["RoleRuleSet"] = None
    missing_location_matches: bool = True
    fuzzy_keys: bool = False
    missing_first_name_penalty: float = 0.9
    explain: bool = False

    def __post_init__(self):
        if self.name_metric not in NAME_METRICS:
            raise ConfigError(
                f"Unknown name_metric '{self.name_metric}'; expected one of {sorted(NAME_METRICS)}"
            )
        for name in ("name_threshold", "location_threshold", "missing_first_name_penalty"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be within [0, 1], got {value}")
        if self.window_years < 0:
            raise ConfigError(f"window_years must be non-negative, got {self.window_years}")
        if self.min_relationship_support < 0:
            raise ConfigError(
                f"min_relationship_support must be non-negative, got {self.min_relationship_support}"
            )

    def with_overrides(self, **overrides: Any) -> "MatchConfig":
        """Copy with the given non-None fields replaced."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **changes) if changes else self


@dataclass(frozen=True)
class MatchDecision:
    """
    Per-pair verdict with the evidence behind it.

    Evidence fields are None when not evaluated (fast mode stops at the first
    failing criterion).
    """

    record_a: str
    record_b: str
    matched: bool
    name_score: Optional[float] = None
    date_ok: Optional[bool] = None
    location_ok: Optional[bool] = None
    relationship_support: Optional[int] = None
    role_veto: Optional[str] = None


@dataclass(frozen=True)
class GroundTruth:
    """Record-to-individual assignment, with optional individual-to-father links."""

    individual_of: Mapping[str, str] = field(default_factory=dict)
    father_of: Mapping[str, str] = field(default_factory=dict)

    def related_generations(self, first: str, second: str) -> bool:
        """True when one individual is the recorded father of the other."""
        return self.father_of.get(first) == second or self.father_of.get(second) == first
