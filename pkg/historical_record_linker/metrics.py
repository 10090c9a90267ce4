"""
String-similarity kernels for name and location comparison.

All functions expect normalized text. Distances come from rapidfuzz; the
Damerau variant is optimal string alignment (OSA), where no substring is
edited twice, so ("ca", "abc") is 3 rather than the unrestricted 2.
"""

from typing import Callable, Dict

from rapidfuzz.distance import JaroWinkler, Levenshtein, OSA

SimilarityScore = float

JARO_WINKLER_PREFIX_WEIGHT = 0.1


def levenshtein(a: str, b: str) -> int:
    return Levenshtein.distance(a, b)


def damerau_levenshtein(a: str, b: str) -> int:
    """Edit distance counting an adjacent transposition as one edit (OSA)."""
    return OSA.distance(a, b)


def jaro_winkler(a: str, b: str) -> SimilarityScore:
    """
    Jaro similarity with the Winkler prefix boost.

    Common prefix capped at 4 characters, scaling 0.1, boost applied above
    a Jaro score of 0.7.
    """
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    return JaroWinkler.similarity(a, b, prefix_weight=JARO_WINKLER_PREFIX_WEIGHT)


def _normalized(distance: int, a: str, b: str) -> SimilarityScore:
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - distance / longest


def normalized_edit_similarity(a: str, b: str) -> SimilarityScore:
    """1 - levenshtein / longer length; two empty strings are identical."""
    return _normalized(levenshtein(a, b), a, b)


def normalized_damerau_similarity(a: str, b: str) -> SimilarityScore:
    return _normalized(damerau_levenshtein(a, b), a, b)


NAME_METRICS: Dict[str, Callable[[str, str], SimilarityScore]] = {
    "jaro_winkler": jaro_winkler,
    "normalized_edit": normalized_edit_similarity,
}
