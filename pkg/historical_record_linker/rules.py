"""
Role-consistency rules.

A rule vetoes a candidate pair when the roles, event types and dates of the
two mentions make them incompatible. Rules are evaluated in declared order
and the first veto wins, so explanations are deterministic. Rulesets load
from JSON:

```json
{
  "hierarchy": ["husband", "wife", "father", "mother", "baptized"],
  "rules": [
    {"id": "R1", "description": "...", "kind": "same_event_veto"},
    {"id": "R2", "kind": "terminal_role_veto", "roles": ["deceased"]},
    {"id": "R3", "kind": "role_pair_window_veto",
     "roles": ["husband"], "other_roles": ["father"],
     "event_types": ["marriage"], "window_years": 10, "direction": "later"}
  ]
}
```

``roles`` may also be written as a pair of lists, ``[["husband"], ["father"]]``,
in place of ``roles`` + ``other_roles``. ``window_years: null`` means any time.
"""

import json
import logging
from functools import lru_cache
from enum import Enum
from pathlib import Path
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple, Union

from historical_record_linker.errors import RuleConfigError
from historical_record_linker.model import OTHER_PREFIX, Event, EventKind, EventType, PersonRecord, Role

logger = logging.getLogger(__name__)


class RuleKind(str, Enum):
    SAME_EVENT_VETO = "same_event_veto"
    TERMINAL_ROLE_VETO = "terminal_role_veto"
    ROLE_PAIR_WINDOW_VETO = "role_pair_window_veto"


class Direction(str, Enum):
    LATER = "later"
    ANY = "any"


@dataclass(frozen=True)
class RoleRule:
    id: str
    kind: RuleKind
    description: str = ""
    roles: FrozenSet[Role] = frozenset()
    other_roles: FrozenSet[Role] = frozenset()
    event_types: FrozenSet[EventType] = frozenset()
    window_years: Optional[int] = None
    direction: Direction = Direction.ANY

    def __post_init__(self):
        if not self.id:
            raise RuleConfigError("Rule id must be non-empty")
        if self.kind is RuleKind.TERMINAL_ROLE_VETO and not self.roles:
            raise RuleConfigError(f"Rule '{self.id}': terminal_role_veto needs at least one role")
        if self.kind is RuleKind.ROLE_PAIR_WINDOW_VETO:
            if not self.roles or not self.other_roles:
                raise RuleConfigError(f"Rule '{self.id}': role_pair_window_veto needs roles on both sides")
            if self.window_years is not None and self.window_years < 0:
                raise RuleConfigError(f"Rule '{self.id}': window_years must be non-negative")

    def vetoes(self, a: PersonRecord, b: PersonRecord, events: Mapping[str, Event]) -> bool:
        if self.kind is RuleKind.SAME_EVENT_VETO:
            return a.event_id == b.event_id
        if self.kind is RuleKind.TERMINAL_ROLE_VETO:
            return self._terminal(a, b, events) or self._terminal(b, a, events)
        return self._role_pair(a, b, events) or self._role_pair(b, a, events)

    def _terminal(self, dead: PersonRecord, other: PersonRecord, events: Mapping[str, Event]) -> bool:
        if dead.role not in self.roles:
            return False
        return events[other.event_id].date.year > events[dead.event_id].date.year

    def _role_pair(self, first: PersonRecord, second: PersonRecord, events: Mapping[str, Event]) -> bool:
        if first.role not in self.roles or second.role not in self.other_roles:
            return False
        second_event = events[second.event_id]
        if self.event_types and second_event.event_type not in self.event_types:
            return False
        if self.window_years is None:
            return True
        gap = second_event.date.year - events[first.event_id].date.year
        if self.direction is Direction.LATER:
            return 0 <= gap <= self.window_years
        return abs(gap) <= self.window_years


@dataclass(frozen=True)
class RoleRuleSet:
    """Ordered veto rules plus a role hierarchy, most-likely-to-match first."""

    rules: Tuple[RoleRule, ...] = ()
    hierarchy: Tuple[Role, ...] = ()
    _ranks: Mapping[Role, int] = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        ids = [rule.id for rule in self.rules]
        duplicates = sorted({i for i in ids if ids.count(i) > 1})
        if duplicates:
            raise RuleConfigError(f"Duplicate rule id(s): {', '.join(duplicates)}")
        if len(set(self.hierarchy)) != len(self.hierarchy):
            raise RuleConfigError("Role hierarchy contains duplicate roles")
        object.__setattr__(self, "_ranks", {role: i for i, role in enumerate(self.hierarchy)})

    def rank(self, role: Role) -> int:
        """Position in the hierarchy; roles not listed rank last."""
        return self._ranks.get(role, len(self.hierarchy))

    def rule_ids(self) -> List[str]:
        return [rule.id for rule in self.rules]


def evaluate_rules(
    a: PersonRecord,
    b: PersonRecord,
    events: Mapping[str, Event],
    ruleset: RoleRuleSet,
) -> Optional[str]:
    """Id of the first rule vetoing the pair, or None."""
    for rule in ruleset.rules:
        if rule.vetoes(a, b, events):
            return rule.id
    return None


def _parse_roles(rule_id: str, labels: Iterable[str]) -> FrozenSet[Role]:
    roles = set()
    for label in labels:
        role = Role.canonical(str(label))
        if role is None:
            raise RuleConfigError(f"Rule '{rule_id}': unknown role label '{label}'")
        roles.add(role)
    return frozenset(roles)


def _parse_event_types(rule_id: str, labels: Iterable[str]) -> FrozenSet[EventType]:
    """Known event types or synonyms; free labels must be spelled `other:<label>`."""
    kinds = set()
    for label in labels:
        text = str(label).strip()
        kind = EventType.parse(text)
        if kind.kind is EventKind.OTHER and not text.lower().startswith(OTHER_PREFIX):
            raise RuleConfigError(f"Rule '{rule_id}': unknown event type '{label}'")
        kinds.add(kind)
    return frozenset(kinds)


def rule_from_dict(data: Mapping[str, Any]) -> RoleRule:
    """Build one rule from its JSON object."""
    rule_id = str(data.get("id", "")).strip()
    if not rule_id:
        raise RuleConfigError(f"Rule is missing 'id': {dict(data)}")
    try:
        kind = RuleKind(data.get("kind"))
    except ValueError:
        raise RuleConfigError(
            f"Rule '{rule_id}': unknown kind '{data.get('kind')}'; "
            f"expected one of {[k.value for k in RuleKind]}"
        )

    raw_roles: Union[List[Any], None] = data.get("roles") or []
    raw_other = data.get("other_roles") or []
    if raw_roles and all(isinstance(item, list) for item in raw_roles):
        if len(raw_roles) != 2 or raw_other:
            raise RuleConfigError(f"Rule '{rule_id}': nested 'roles' must be exactly two lists")
        raw_roles, raw_other = raw_roles

    try:
        direction = Direction(data.get("direction", Direction.ANY.value))
    except ValueError:
        raise RuleConfigError(f"Rule '{rule_id}': direction must be 'later' or 'any'")

    window = data.get("window_years")
    if window is not None and (isinstance(window, bool) or not isinstance(window, int)):
        raise RuleConfigError(f"Rule '{rule_id}': window_years must be an integer or null")

    return RoleRule(
        id=rule_id,
        kind=kind,
        description=str(data.get("description", "")),
        roles=_parse_roles(rule_id, raw_roles),
        other_roles=_parse_roles(rule_id, raw_other),
        event_types=_parse_event_types(rule_id, data.get("event_types") or []),
        window_years=window,
        direction=direction,
    )


def ruleset_from_dict(data: Mapping[str, Any]) -> RoleRuleSet:
    if not isinstance(data, Mapping):
        raise RuleConfigError("Ruleset must be a JSON object with 'rules' and 'hierarchy'")
    rules_data = data.get("rules", [])
    if not isinstance(rules_data, list):
        raise RuleConfigError("'rules' must be a list")

    rules = []
    for entry in rules_data:
        if not isinstance(entry, Mapping):
            raise RuleConfigError(f"Rule entry must be an object, got {entry!r}")
        if not entry.get("enabled", True):
            logger.info(f"Rule '{entry.get('id')}' disabled in configuration")
            continue
        rules.append(rule_from_dict(entry))

    hierarchy = []
    for label in data.get("hierarchy", []):
        role = Role.canonical(str(label))
        if role is None:
            raise RuleConfigError(f"Unknown role label '{label}' in hierarchy")
        hierarchy.append(role)

    return RoleRuleSet(rules=tuple(rules), hierarchy=tuple(hierarchy))


DEFAULT_RULES: Dict[str, Any] = {
    "hierarchy": [
        "husband", "wife", "groom", "bride", "father", "mother", "deceased",
        "baptized", "child", "godparent", "witness", "clergy",
    ],
    "rules": [
        {
            "id": "R1",
            "kind": "same_event_veto",
            "description": "Two mentions in the same event are different people",
        },
        {
            "id": "R2",
            "kind": "terminal_role_veto",
            "roles": ["deceased"],
            "description": "Nobody appears in a record dated after their burial",
        },
        {
            "id": "R3",
            "kind": "role_pair_window_veto",
            "roles": ["husband", "wife"],
            "other_roles": ["father", "mother"],
            "event_types": ["marriage"],
            "window_years": 10,
            "direction": "later",
            "description": "A spouse is not a parent of the couple in a marriage a few years later",
        },
        {
            "id": "R4",
            "kind": "role_pair_window_veto",
            "roles": ["bride", "groom"],
            "other_roles": ["father", "mother"],
            "event_types": ["marriage"],
            "window_years": None,
            "description": "Someone getting married is never a parent of a marrying couple",
        },
        {
            "id": "R5",
            "kind": "role_pair_window_veto",
            "roles": ["baptized"],
            "other_roles": ["husband", "wife", "groom", "bride", "father", "mother"],
            "window_years": 12,
            "direction": "any",
            "description": "A child at baptism is not a spouse or parent within a few years",
        },
    ],
}


@lru_cache(maxsize=None)
def default_ruleset() -> RoleRuleSet:
    """The built-in R1-R5 rules; parsed once and shared."""
    return ruleset_from_dict(DEFAULT_RULES)


EMPTY_RULESET = RoleRuleSet()


def load_ruleset(path: Union[str, Path]) -> RoleRuleSet:
    """
    Load a ruleset from a UTF-8 JSON file.

    Raises:
        RuleConfigError: unreadable file, malformed JSON, or invalid rules
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise RuleConfigError(f"Ruleset file '{path}' not found")
    except json.JSONDecodeError as e:
        raise RuleConfigError(f"Error parsing ruleset '{path}': {e}")

    ruleset = ruleset_from_dict(data)
    logger.info(f"Loaded {len(ruleset.rules)} rule(s) from {path}: {', '.join(ruleset.rule_ids())}")
    return ruleset
