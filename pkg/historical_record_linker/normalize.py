"""Cleaning and standardization of names, locations and event dates."""

import re
import logging
import unicodedata
from dataclasses import dataclass
from typing import Dict, Iterable, NewType, Optional, Tuple
from datetime import date

from historical_record_linker.errors import ConfigError, DateParseError

logger = logging.getLogger(__name__)

NormalizedText = NewType("NormalizedText", str)

AliasTable = Dict[str, str]

MIN_YEAR = 1500
MAX_YEAR = 2100

_NON_WORD = re.compile(r"[\W_]+")
_DATE_PATTERN = re.compile(r"^(\d{4})(?:-(\d{1,2})(?:-(\d{1,2}))?)?$")


@dataclass(frozen=True, order=True)
class EventDate:
    """Date of a recorded event, precise to the year, month or day."""

    year: int
    month: Optional[int] = None
    day: Optional[int] = None

    def __post_init__(self):
        raw = self.isoformat()
        if not MIN_YEAR <= self.year <= MAX_YEAR:
            raise DateParseError(raw, "year", f"must be within {MIN_YEAR}-{MAX_YEAR}")
        if self.month is not None and not 1 <= self.month <= 12:
            raise DateParseError(raw, "month", "must be within 1-12")
        if self.day is not None:
            if self.month is None:
                raise DateParseError(raw, "day", "given without a month")
            try:
                date(self.year, self.month, self.day)
            except ValueError:
                raise DateParseError(raw, "day", f"out of range for {self.year}-{self.month:02d}")

    def sort_key(self) -> Tuple[int, int, int]:
        """(year, month-or-0, day-or-0), the index ordering key."""
        return (self.year, self.month or 0, self.day or 0)

    def isoformat(self) -> str:
        text = f"{self.year:04d}"
        if self.month is not None:
            text += f"-{self.month:02d}"
            if self.day is not None:
                text += f"-{self.day:02d}"
        return text

    def __str__(self) -> str:
        return self.isoformat()


def normalize_text(raw: str) -> NormalizedText:
    """Lowercase, fold diacritics, turn punctuation into spaces, squeeze whitespace."""
    if not raw:
        return NormalizedText("")
    # compatibility forms such as "℃" decompose to uppercase, so fold case afterwards
    folded = unicodedata.normalize("NFKD", raw).casefold()
    folded = "".join(ch for ch in folded if not unicodedata.combining(ch))
    return NormalizedText(" ".join(_NON_WORD.sub(" ", folded).split()))


def normalize_name(raw: str) -> NormalizedText:
    return normalize_text(raw)


def normalize_location(raw: str, aliases: Optional[AliasTable] = None) -> NormalizedText:
    """Normalize a location and resolve it through the alias table."""
    value = normalize_text(raw)
    if aliases and value in aliases:
        return NormalizedText(aliases[value])
    return value


def build_alias_table(pairs: Iterable[Tuple[str, str]]) -> AliasTable:
    """
    Build an alias table from (alias, canonical) pairs.

    Both sides are normalized. A canonical value may not itself be an alias,
    so resolution always takes a single step.

    Raises:
        ConfigError: if a canonical value is also an alias key, or an alias
            maps to two different canonical values
    """
    table: AliasTable = {}
    for alias, canonical in pairs:
        key = normalize_text(alias)
        value = normalize_text(canonical)
        if not key or not value or key == value:
            continue
        if key in table and table[key] != value:
            raise ConfigError(f"Alias '{key}' maps to both '{table[key]}' and '{value}'")
        table[key] = value

    chained = sorted(v for v in set(table.values()) if v in table)
    if chained:
        raise ConfigError(f"Canonical locations are themselves aliases: {', '.join(chained)}")

    logger.debug(f"Alias table built with {len(table)} mapping(s)")
    return table


def parse_date(raw: str) -> EventDate:
    """
    Parse "YYYY", "YYYY-MM" or "YYYY-MM-DD".

    Raises:
        DateParseError: naming the malformed or out-of-range field
    """
    text = (raw or "").strip()
    match = _DATE_PATTERN.match(text)
    if not match:
        raise DateParseError(text, "format", "must be YYYY, YYYY-MM or YYYY-MM-DD")
    year, month, day = match.groups()
    return EventDate(
        year=int(year),
        month=int(month) if month is not None else None,
        day=int(day) if day is not None else None,
    )


def format_date(value: EventDate) -> str:
    return value.isoformat()
