"""Blocking: group records by name key and sort each group by event date."""

import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

from rapidfuzz import process
from rapidfuzz.distance import JaroWinkler

from historical_record_linker.metrics import JARO_WINKLER_PREFIX_WEIGHT
from historical_record_linker.model import Corpus, MatchConfig, NameKey
from historical_record_linker.union_find import UnionFind

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IndexGroup:
    """Records sharing a name key, sorted by (event date, record_id)."""

    key: NameKey
    members: Tuple[str, ...]

    def __len__(self) -> int:
        return len(self.members)


def _key_text(key: NameKey) -> str:
    return f"{key[0]} {key[1]}".strip()


def merge_similar_keys(keys: List[NameKey], threshold: float) -> List[List[NameKey]]:
    """
    Single-linkage merge of name keys whose Jaro-Winkler similarity on the
    concatenated "first last" text reaches the threshold.
    """
    ordered = sorted(keys)
    texts = [_key_text(k) for k in ordered]
    uf: UnionFind[NameKey] = UnionFind(ordered)
    for i, text in enumerate(texts[:-1]):
        hits = process.extract(
            text,
            texts[i + 1:],
            scorer=JaroWinkler.similarity,
            scorer_kwargs={"prefix_weight": JARO_WINKLER_PREFIX_WEIGHT},
            score_cutoff=threshold,
            limit=None,
        )
        for _, _, offset in hits:
            uf.union(ordered[i], ordered[i + 1 + offset])
    return [sorted(group) for group in uf.groups()]


def build_index(corpus: Corpus, config: MatchConfig) -> List[IndexGroup]:
    """
    Partition matchable records into index groups.

    Groups are keyed by the exact normalized (first, last) pair; records with
    no first name block under an empty first-name key. With
    ``config.fuzzy_keys`` similar keys are merged and the merged group takes
    its lexicographically smallest key. Groups come back sorted by key.
    """
    blocks: Dict[NameKey, List[str]] = {}
    for record in corpus.persons.values():
        blocks.setdefault(record.name_key, []).append(record.record_id)

    if config.fuzzy_keys and len(blocks) > 1:
        merged: Dict[NameKey, List[str]] = {}
        for keys in merge_similar_keys(list(blocks), config.name_threshold):
            merged[keys[0]] = [rid for key in keys for rid in blocks[key]]
        logger.info(f"Fuzzy keying merged {len(blocks)} name keys into {len(merged)} groups")
        blocks = merged

    def order(record_id: str):
        return (corpus.event_of(corpus.persons[record_id]).date.sort_key(), record_id)

    groups = [
        IndexGroup(key=key, members=tuple(sorted(members, key=order)))
        for key, members in sorted(blocks.items())
    ]

    placed = sum(len(g) for g in groups)
    if placed != len(corpus.persons):
        raise RuntimeError(f"Index partition broken: {placed} placements for {len(corpus.persons)} records")

    logger.info(f"Built {len(groups)} index group(s) over {placed} record(s)")
    return groups
