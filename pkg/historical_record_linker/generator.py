"""
Synthetic sacramental corpora with ground truth.

Households are the unit of generation: a marriage (husband, wife, the
husband's parents when known, witnesses) followed by baptisms of the
couple's children, each with father, mother and a godparent. Sons may
marry 20-30 years after their baptism and found a household of their own
in the parental parish; the first son can inherit his father's first name,
which plants the father/son traps historical archives are known for.
Deaths follow an individual's last recorded event.
"""

import random
import logging
from pathlib import Path
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple, Union

from historical_record_linker.corpus_io import (
    ALIAS_COLUMNS,
    EVENT_COLUMNS,
    PERSON_COLUMNS,
    ensure_dir,
    write_table,
    write_truth,
)
from historical_record_linker.errors import GenParamsError
from historical_record_linker.model import GroundTruth
from historical_record_linker.normalize import normalize_text

logger = logging.getLogger(__name__)

MALE_NAMES = [
    "Adolphe", "Alexandre", "Ambroise", "Andre", "Antoine", "Augustin", "Baptiste",
    "Charles", "Cuthbert", "Daniel", "David", "Donald", "Edouard", "Elzear", "Etienne",
    "Francois", "Gabriel", "George", "Gilbert", "Guillaume", "Henri", "Hugh", "Isidore",
    "Jacques", "James", "Jean", "Jerome", "John", "Joseph", "Julien", "Laurent", "Louis",
    "Magnus", "Marcel", "Maxime", "Michel", "Moise", "Narcisse", "Norbert", "Olivier",
    "Pascal", "Patrice", "Paul", "Peter", "Philippe", "Pierre", "Roderick", "Roger",
    "Samuel", "Simon", "Thomas", "Toussaint", "Urbain", "Victor", "Vital", "William",
]
FEMALE_NAMES = [
    "Adelaide", "Agathe", "Angelique", "Anne", "Catherine", "Cecile", "Charlotte",
    "Christine", "Claire", "Delphine", "Eliza", "Elizabeth", "Emilie", "Euphrosine",
    "Flora", "Genevieve", "Helene", "Henriette", "Isabelle", "Jane", "Josephte",
    "Judith", "Julie", "Louise", "Lucie", "Madeleine", "Marguerite", "Maria",
    "Marianne", "Marie", "Martha", "Mary", "Melanie", "Nancy", "Olive", "Pelagie",
    "Philomene", "Rosalie", "Sarah", "Sophie", "Suzanne", "Therese", "Veronique",
    "Victoire", "Virginie",
]
SURNAMES = [
    "Allery", "Beauchemin", "Belcourt", "Bird", "Boucher", "Bourassa", "Breland",
    "Bruce", "Budd", "Cook", "Cyr", "Delorme", "Desjarlais", "Desroches", "Dumas",
    "Dumont", "Favel", "Fidler", "Flett", "Gariepy", "Genaille", "Gladu", "Goulet",
    "Grant", "Harper", "Hallett", "Inkster", "Isbister", "Kipling", "Lambert",
    "Langdon", "Laroque", "Laviolette", "Lepine", "Linklater", "Lussier", "McKay",
    "McDermott", "Moar", "Morin", "Nolin", "Ouellette", "Pangman", "Parenteau",
    "Poitras", "Ross", "Sayer", "Setter", "Sinclair", "Spence", "Tait", "Thomas",
    "Trottier", "Vandal", "Wells",
]
SURNAME_HEADS = [
    "Bel", "Bou", "Cha", "Dau", "Fon", "Gau", "Her", "Jol", "Lac", "Mal",
    "Nad", "Pel", "Ri", "Sau", "Tur", "Val", "Ver", "Mor", "Lan", "Cor",
]
SURNAME_TAILS = [
    "ard", "bert", "din", "eau", "elle", "ier", "isse", "mont", "nier", "ot",
    "quette", "rand", "reau", "ville", "vin", "court", "gnon", "lard", "ssier", "than",
]
PARISHES = [
    ("Grand Rapids Church", "Rapids Church"),
    ("St Boniface Cathedral", "St Boniface"),
    ("St Andrews Church", "St Andrews"),
    ("St Francois Xavier Mission", "St Francois Xavier"),
    ("Lac Ste Anne Mission", "Lac Ste Anne"),
    ("St Norbert Parish", "St Norbert"),
    ("Ile a la Crosse Mission", "Ile a la Crosse"),
    ("St Laurent de Grandin", "St Laurent"),
    ("Pembina Chapel", "Pembina"),
    ("St Albert Mission", "St Albert"),
    ("Fort Garry Chapel", "Fort Garry"),
    ("Red Deer Forks Church", "Red Deer Forks"),
    ("Batoche Parish", "Batoche"),
    ("Qu'Appelle Lakes Mission", "Qu'Appelle"),
    ("Kildonan Presbyterian", "Kildonan"),
    ("Moose Factory Post", "Moose Factory"),
    ("Norway House Chapel", "Norway House"),
    ("Cumberland House Church", "Cumberland House"),
    ("Baie St Paul Church", "Baie St Paul"),
    ("Duck Lake Mission", "Duck Lake"),
]
PLACE_WORDS = [
    "Beaver", "Cedar", "Crane", "Eagle", "Heron", "Moose", "Otter", "Pine", "Raven",
    "Sturgeon", "Swan", "Willow", "Wolf", "Birch", "Loon", "Elk", "Bear", "Hawk",
]
PLACE_KINDS = ["Creek Mission", "Lake Chapel", "River Church", "Point Parish", "Hills Station"]

HOUSEHOLD_FIRST_YEAR = 1800
HOUSEHOLD_LAST_YEAR = 1870
LAST_MARRIAGE_YEAR = 1915


@dataclass(frozen=True)
class GenParams:
    """
    Synthetic corpus parameters.

    ``events_per_individual`` bounds how many events a married couple appears
    in (their marriage plus one baptism per child). ``families`` is the number
    of lineages (surnames); None derives one per 20 individuals.
    """

    n_individuals: int = 1000
    families: Optional[int] = None
    events_per_individual: Tuple[int, int] = (2, 6)
    typo_rate: float = 0.0
    location_alias_rate: float = 0.0
    date_jitter_years: int = 0
    duplicate_name_rate: float = 0.0
    seed: int = 0
    n_locations: int = 40
    death_rate: float = 0.5
    marriage_rate: float = 0.6
    generations: int = 2
    max_span_years: Optional[int] = None

    def __post_init__(self):
        if self.n_individuals <= 0:
            raise GenParamsError(f"n_individuals must be positive, got {self.n_individuals}")
        if self.families is not None and self.families <= 0:
            raise GenParamsError(f"families must be positive, got {self.families}")
        low, high = self.events_per_individual
        if low < 1 or high < low:
            raise GenParamsError(f"events_per_individual must satisfy 1 <= min <= max, got {low}, {high}")
        for name in ("typo_rate", "location_alias_rate", "duplicate_name_rate", "death_rate", "marriage_rate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise GenParamsError(f"{name} must be a probability, got {value}")
        if self.date_jitter_years < 0:
            raise GenParamsError(f"date_jitter_years must be non-negative, got {self.date_jitter_years}")
        if self.n_locations <= 0:
            raise GenParamsError(f"n_locations must be positive, got {self.n_locations}")
        if self.generations < 1:
            raise GenParamsError(f"generations must be at least 1, got {self.generations}")
        if self.max_span_years is not None and self.max_span_years < 1:
            raise GenParamsError(f"max_span_years must be at least 1, got {self.max_span_years}")
        if not 0 <= self.seed < 2 ** 64:
            raise GenParamsError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def lineages(self) -> int:
        return self.families or max(1, self.n_individuals // 20)


@dataclass
class Individual:
    individual_id: str
    first_name: str
    last_name: str
    male: bool
    father_id: Optional[str] = None
    years: List[int] = field(default_factory=list)


@dataclass
class SyntheticCorpus:
    """In-memory generated corpus, rows in the ingest file formats."""

    events: List[List[str]] = field(default_factory=list)
    persons: List[List[str]] = field(default_factory=list)
    aliases: List[List[str]] = field(default_factory=list)
    truth: GroundTruth = field(default_factory=GroundTruth)


@dataclass(frozen=True)
class GeneratedFiles:
    events: Path
    persons: Path
    truth: Path
    aliases: Path


class CorpusBuilder:
    """Single seeded random stream producing one corpus."""

    def __init__(self, params: GenParams):
        self.params = params
        self.rng = random.Random(params.seed)
        self.individuals: Dict[str, Individual] = {}
        self.used_names: Set[Tuple[str, str]] = set()
        self.events: List[List[str]] = []
        self.persons: List[List[str]] = []
        self.truth: Dict[str, str] = {}
        self.spouses: List[Tuple[Individual, Individual, int]] = []
        self.surnames = self._make_surnames(params.lineages)
        self.parishes = self._make_parishes(params.n_locations)

    def _make_surnames(self, count: int) -> List[str]:
        names = list(SURNAMES[:count])
        seen = {normalize_text(n) for n in names}
        while len(names) < count:
            candidate = self.rng.choice(SURNAME_HEADS) + self.rng.choice(SURNAME_TAILS)
            if len(names) >= len(SURNAME_HEADS) * len(SURNAME_TAILS) // 2:
                candidate += self.rng.choice(SURNAME_TAILS)
            if len(names) >= 4000:
                candidate = f"{self.rng.choice(SURNAMES)}-{candidate}"
            if normalize_text(candidate) not in seen:
                seen.add(normalize_text(candidate))
                names.append(candidate)
        return names

    def _make_parishes(self, count: int) -> List[Tuple[str, str]]:
        parishes = list(PARISHES[:count])
        extra = [
            (f"{word} {kind}", f"{word} {kind.split()[0]}")
            for kind in PLACE_KINDS for word in PLACE_WORDS
        ]
        parishes.extend(extra[:max(0, count - len(parishes))])
        suffix = 2
        while len(parishes) < count:
            for word in PLACE_WORDS:
                if len(parishes) >= count:
                    break
                parishes.append((f"{word} Post No {suffix}", f"{word} Post {suffix}"))
            suffix += 1
        return parishes

    def _first_name(self, male: bool, last_name: str) -> str:
        pool = MALE_NAMES if male else FEMALE_NAMES
        for _ in range(30):
            first = self.rng.choice(pool)
            if (normalize_text(first), normalize_text(last_name)) not in self.used_names:
                return first
        for _ in range(1000):
            first = f"{self.rng.choice(pool)} {self.rng.choice(pool)}"
            if (normalize_text(first), normalize_text(last_name)) not in self.used_names:
                return first
        raise GenParamsError(
            f"Ran out of distinct names for surname '{last_name}'; raise families for {self.params.n_individuals} individuals"
        )

    def new_individual(
        self,
        male: bool,
        last_name: str,
        father: Optional[Individual] = None,
        first_name: Optional[str] = None,
    ) -> Individual:
        first = first_name or self._first_name(male, last_name)
        self.used_names.add((normalize_text(first), normalize_text(last_name)))
        person = Individual(
            individual_id=f"i{len(self.individuals) + 1:07d}",
            first_name=first,
            last_name=last_name,
            male=male,
            father_id=father.individual_id if father else None,
        )
        self.individuals[person.individual_id] = person
        return person

    def _stranger(self) -> Individual:
        return self.new_individual(self.rng.random() < 0.5, self.rng.choice(self.surnames))

    def _recorded_year(self, year: int) -> int:
        jitter = self.params.date_jitter_years
        return year + self.rng.randint(-jitter, jitter) if jitter else year

    def _date_text(self, year: int) -> str:
        if self.rng.random() < 0.5:
            return str(year)
        return f"{year:04d}-{self.rng.randint(1, 12):02d}-{self.rng.randint(1, 28):02d}"

    def add_event(self, kind: str, year: int, parish: int) -> Tuple[str, int]:
        event_id = f"e{len(self.events) + 1:07d}"
        canonical, alias = self.parishes[parish]
        location = alias if self.rng.random() < self.params.location_alias_rate else canonical
        self.events.append([event_id, kind, self._date_text(year), location])
        return event_id, year

    def _typo(self, text: str) -> str:
        letters = "abcdefghijklmnopqrstuvwxyz"
        if len(text) < 2:
            return text
        i = self.rng.randrange(len(text) - 1)
        if self.rng.random() < 0.5 and text[i] != text[i + 1]:
            return text[:i] + text[i + 1] + text[i] + text[i + 2:]
        replacement = self.rng.choice([c for c in letters if c != text[i].lower()])
        return text[:i] + replacement + text[i + 1:]

    def mention(self, person: Individual, event: Tuple[str, int], role: str) -> None:
        event_id, year = event
        record_id = f"r{len(self.persons) + 1:07d}"
        first, last = person.first_name, person.last_name
        if self.rng.random() < self.params.typo_rate:
            if self.rng.random() < 0.5:
                first = self._typo(first)
            else:
                last = self._typo(last)
        self.persons.append([record_id, event_id, first, last, role])
        self.truth[record_id] = person.individual_id
        person.years.append(year)

    def household(
        self,
        husband: Individual,
        year: int,
        parish: int,
        generation: int,
        parents: Optional[Tuple[Individual, Individual]] = None,
    ) -> None:
        """A marriage, the couple's baptisms and, recursively, their sons' households."""
        params = self.params
        wife = self.new_individual(False, self.rng.choice(self.surnames))
        marriage = self.add_event("marriage", self._recorded_year(year), parish)
        self.mention(husband, marriage, "husband")
        self.mention(wife, marriage, "wife")
        if parents:
            self.mention(parents[0], marriage, "father")
            self.mention(parents[1], marriage, "mother")
        for _ in range(self.rng.randint(1, 2)):
            self.mention(self._stranger(), marriage, "witness")

        low, high = params.events_per_individual
        baptism_year = year
        named_son = False
        sons: List[Tuple[Individual, int]] = []
        for _ in range(self.rng.randint(low - 1, high - 1)):
            baptism_year += self.rng.randint(1, 3)
            if params.max_span_years is not None:
                baptism_year = min(baptism_year, year + params.max_span_years)
            male = self.rng.random() < 0.5
            first = None
            if male and not named_son:
                named_son = True
                if self.rng.random() < params.duplicate_name_rate:
                    first = husband.first_name
            child = self.new_individual(male, husband.last_name, father=husband, first_name=first)
            baptism = self.add_event("baptism", self._recorded_year(baptism_year), parish)
            self.mention(child, baptism, "baptized")
            self.mention(husband, baptism, "father")
            self.mention(wife, baptism, "mother")
            self.mention(self._stranger(), baptism, "godparent")
            if male and generation < params.generations and self.rng.random() < params.marriage_rate:
                sons.append((child, baptism_year + self.rng.randint(20, 30)))

        self.spouses.append((husband, wife, parish))
        for son, son_year in sons:
            if son_year <= LAST_MARRIAGE_YEAR:
                self.household(son, son_year, parish, generation + 1, parents=(husband, wife))

    def add_deaths(self) -> None:
        """Burials strictly follow, or share the year of, each spouse's last event."""
        for husband, wife, parish in self.spouses:
            for person in (husband, wife):
                if person.years and self.rng.random() < self.params.death_rate:
                    last = max(person.years)
                    year = last + self.rng.randint(0, 2)
                    if self.params.max_span_years is not None:
                        year = max(last, min(year, min(person.years) + self.params.max_span_years))
                    self.mention(person, self.add_event("death", year, parish), "deceased")

    def build(self) -> SyntheticCorpus:
        params = self.params
        lineage = 0
        while len(self.individuals) < params.n_individuals:
            surname = self.surnames[lineage % len(self.surnames)]
            lineage += 1
            husband = self.new_individual(True, surname)
            year = self.rng.randint(HOUSEHOLD_FIRST_YEAR, HOUSEHOLD_LAST_YEAR)
            self.household(husband, year, self.rng.randrange(len(self.parishes)), generation=1)
        self.add_deaths()

        father_of = {
            p.individual_id: p.father_id for p in self.individuals.values() if p.father_id
        }
        logger.info(
            f"Generated {len(self.individuals)} individual(s), {len(self.events)} event(s), "
            f"{len(self.persons)} person record(s)"
        )
        return SyntheticCorpus(
            events=self.events,
            persons=self.persons,
            aliases=[[alias, canonical] for canonical, alias in self.parishes],
            truth=GroundTruth(individual_of=dict(self.truth), father_of=father_of),
        )


def synthesize(params: GenParams) -> SyntheticCorpus:
    """Deterministic in-memory corpus for ``params.seed``."""
    return CorpusBuilder(params).build()


def generate_corpus(params: GenParams, out_dir: Union[str, Path]) -> GeneratedFiles:
    """
    Write events.csv, persons.csv, truth.csv and aliases.csv to ``out_dir``.

    Files are a deterministic function of the parameters, seed included.
    """
    out_dir = ensure_dir(out_dir)
    corpus = synthesize(params)
    return GeneratedFiles(
        events=write_table(corpus.events, EVENT_COLUMNS, out_dir / "events.csv"),
        persons=write_table(corpus.persons, PERSON_COLUMNS, out_dir / "persons.csv"),
        truth=write_truth(corpus.truth, out_dir / "truth.csv"),
        aliases=write_table(corpus.aliases, ALIAS_COLUMNS, out_dir / "aliases.csv"),
    )
