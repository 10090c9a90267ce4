"""
Pairwise scoring of record sets against ground truth, and threshold sweeps.

Every unordered pair of records placed in one set is a predicted pair; it is
a true match when the truth assigns both records to the same individual.
With no predicted pairs precision is 1.0; recall is None when the truth
holds no co-referent pairs among the scored records.
"""

import logging
from pathlib import Path
from itertools import combinations, product
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Union
from concurrent.futures import ThreadPoolExecutor, as_completed

from historical_record_linker.cluster import RecordSet, cluster_corpus
from historical_record_linker.corpus_io import ensure_dir, write_table
from historical_record_linker.errors import ConfigError, ResultWriteError, ScoringError
from historical_record_linker.model import Corpus, GroundTruth, MatchConfig

logger = logging.getLogger(__name__)

SAME_NAME_DIFFERENT_GENERATION = "same_name_different_generation"
SAME_NAME_UNRELATED = "same_name_unrelated"
NAME_VARIANT = "name_variant"
MIXED_EVENT_TYPES = "mixed"

SWEEPABLE = ("window_years", "name_threshold", "location_threshold", "min_relationship_support")
SWEEP_METRIC_COLUMNS = ["pairs_predicted", "true_matches", "false_matches", "precision", "recall"]


@dataclass
class EvalReport:
    pairs_predicted: int = 0
    true_matches: int = 0
    false_matches: int = 0
    precision: float = 1.0
    recall: Optional[float] = None
    true_pairs: int = 0
    error_categories: Dict[str, int] = field(default_factory=dict)
    by_event_type: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _pairs(n: int) -> int:
    return n * (n - 1) // 2


def _ratio(hits: int, total: int) -> float:
    return hits / total if total else 1.0


def _error_category(first: str, second: str, corpus: Corpus, truth: GroundTruth) -> str:
    a, b = corpus.persons[first], corpus.persons[second]
    if a.name_key != b.name_key:
        return NAME_VARIANT
    if truth.related_generations(truth.individual_of[first], truth.individual_of[second]):
        return SAME_NAME_DIFFERENT_GENERATION
    return SAME_NAME_UNRELATED


def _event_type_of_pair(first: str, second: str, corpus: Corpus) -> str:
    kind_a = corpus.event_of(corpus.persons[first]).event_type
    kind_b = corpus.event_of(corpus.persons[second]).event_type
    return str(kind_a) if kind_a == kind_b else MIXED_EVENT_TYPES


def score(
    sets: Iterable[RecordSet],
    truth: GroundTruth,
    corpus: Optional[Corpus] = None,
) -> EvalReport:
    """
    Pairwise precision and recall of ``sets`` against ``truth``.

    Recall counts truly co-referent pairs among the records present in
    ``sets``. With a corpus, false pairs are broken down by error category
    and precision is reported per event type as well.

    Raises:
        ScoringError: a record in ``sets`` is missing from the truth
    """
    sets = list(sets)
    scored: List[str] = [rid for record_set in sets for rid in record_set.members]
    missing = sorted(rid for rid in scored if rid not in truth.individual_of)
    if missing:
        shown = ", ".join(missing[:5])
        raise ScoringError(f"{len(missing)} record(s) missing from truth, e.g. {shown}")

    report = EvalReport()
    categories: Counter = Counter()
    per_type: Dict[str, Counter] = defaultdict(Counter)

    for record_set in sets:
        for first, second in combinations(record_set.members, 2):
            correct = truth.individual_of[first] == truth.individual_of[second]
            report.pairs_predicted += 1
            if correct:
                report.true_matches += 1
            else:
                report.false_matches += 1
            if corpus is not None:
                bucket = per_type[_event_type_of_pair(first, second, corpus)]
                bucket["pairs_predicted"] += 1
                bucket["true_matches"] += int(correct)
                if not correct:
                    categories[_error_category(first, second, corpus, truth)] += 1

    sizes = Counter(truth.individual_of[rid] for rid in scored)
    report.true_pairs = sum(_pairs(n) for n in sizes.values())
    report.precision = _ratio(report.true_matches, report.pairs_predicted)
    report.recall = report.true_matches / report.true_pairs if report.true_pairs else None
    report.error_categories = dict(sorted(categories.items()))
    report.by_event_type = {
        kind: {
            "pairs_predicted": counts["pairs_predicted"],
            "true_matches": counts["true_matches"],
            "precision": _ratio(counts["true_matches"], counts["pairs_predicted"]),
        }
        for kind, counts in sorted(per_type.items())
    }

    recall = "n/a" if report.recall is None else f"{report.recall:.4f}"
    logger.info(
        f"Scored {report.pairs_predicted} predicted pair(s): "
        f"precision {report.precision:.4f}, recall {recall}"
    )
    return report


def sweep_points(ranges: Mapping[str, Sequence[Any]]) -> List[Dict[str, Any]]:
    """
    Cartesian product of the parameter ranges, in canonical order: parameters
    sorted by name, values in the order given.

    Raises:
        ConfigError: no ranges, an empty range, or a parameter that cannot be swept
    """
    if not ranges:
        raise ConfigError("Sweep needs at least one parameter range")
    names = sorted(ranges)
    for name in names:
        if name not in SWEEPABLE:
            raise ConfigError(f"Cannot sweep '{name}'; expected one of {list(SWEEPABLE)}")
        if not ranges[name]:
            raise ConfigError(f"Sweep range for '{name}' is empty")
    return [dict(zip(names, values)) for values in product(*(ranges[n] for n in names))]


def _run_point(
    index: int,
    point: Dict[str, Any],
    corpus: Corpus,
    truth: GroundTruth,
    base_config: MatchConfig,
):
    config = base_config.with_overrides(**point)
    report = score(cluster_corpus(corpus, config), truth)
    row = dict(point)
    row.update({name: getattr(report, name) for name in SWEEP_METRIC_COLUMNS})
    return index, row


def sweep(
    ranges: Mapping[str, Sequence[Any]],
    corpus: Corpus,
    truth: GroundTruth,
    base_config: Optional[MatchConfig] = None,
    jobs: int = 1,
) -> List[Dict[str, Any]]:
    """
    One clustering and score per configuration point.

    Points are independent and may run on ``jobs`` worker threads; rows come
    back in canonical point order either way.
    """
    base_config = base_config or MatchConfig()
    points = sweep_points(ranges)
    logger.info(f"Sweeping {len(points)} configuration point(s) over {', '.join(sorted(ranges))}")

    rows: List[Optional[Dict[str, Any]]] = [None] * len(points)
    if jobs <= 1 or len(points) <= 1:
        for i, point in enumerate(points):
            _, rows[i] = _run_point(i, point, corpus, truth, base_config)
    else:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            futures = [
                executor.submit(_run_point, i, point, corpus, truth, base_config)
                for i, point in enumerate(points)
            ]
            for future in as_completed(futures):
                i, row = future.result()
                rows[i] = row
    return rows


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def write_sweep(rows: List[Dict[str, Any]], path: Union[str, Path]) -> Path:
    """Sweep table as CSV with one header row: parameters then metrics."""
    path = Path(path)
    if not rows:
        raise ResultWriteError(str(path), "no sweep rows to write")
    params = [name for name in rows[0] if name not in SWEEP_METRIC_COLUMNS]
    columns = params + SWEEP_METRIC_COLUMNS
    ensure_dir(path.parent)
    write_table([[_cell(row[c]) for c in columns] for row in rows], columns, path)
    logger.info(f"Wrote {len(rows)} sweep row(s) to {path}")
    return path
