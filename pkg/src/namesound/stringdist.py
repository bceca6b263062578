"""String distances and the candidate ordering used to rank suggestions.

``edit_distance`` is plain Levenshtein; ``damerau_levenshtein`` is the
optimal-string-alignment variant (an adjacent transposition costs one
operation, but no substring is edited twice — the unrestricted 1964 metric
differs only on degenerate cases like "ca" → "abc" that never matter for
name ranking). Jaro-Winkler uses the standard prefix bound of 4 and
scaling factor 0.1.

Distances operate verbatim on the strings they are given; ``Name`` inputs
contribute their normalized form.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .corpus import Name


def _text(value: Name | str) -> str:
    return value.normalized if isinstance(value, Name) else value


def edit_distance(a: Name | str, b: Name | str) -> int:
    """Minimal number of single-character insertions, deletions, and
    substitutions transforming ``a`` into ``b``."""
    s, t = _text(a), _text(b)
    if s == t:
        return 0
    if not s:
        return len(t)
    if not t:
        return len(s)
    previous = list(range(len(t) + 1))
    for i, cs in enumerate(s, start=1):
        current = [i]
        for j, ct in enumerate(t, start=1):
            current.append(min(
                previous[j] + 1,          # deletion
                current[j - 1] + 1,       # insertion
                previous[j - 1] + (cs != ct),
            ))
        previous = current
    return previous[-1]


def damerau_levenshtein(a: Name | str, b: Name | str) -> int:
    """Optimal-string-alignment distance: edit operations plus adjacent
    transpositions, never exceeding ``edit_distance``."""
    s, t = _text(a), _text(b)
    if s == t:
        return 0
    if not s:
        return len(t)
    if not t:
        return len(s)
    two_back: list[int] | None = None
    previous = list(range(len(t) + 1))
    for i, cs in enumerate(s, start=1):
        current = [i]
        for j, ct in enumerate(t, start=1):
            cost = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (cs != ct),
            )
            if (two_back is not None and i > 1 and j > 1
                    and cs == t[j - 2] and s[i - 2] == ct):
                cost = min(cost, two_back[j - 2] + 1)
            current.append(cost)
        two_back, previous = previous, current
    return previous[-1]


def jaro_similarity(a: Name | str, b: Name | str) -> float:
    """Jaro similarity in [0, 1]; 1 for equal strings, 0 when no
    characters match within the Jaro window."""
    s, t = _text(a), _text(b)
    if s == t:
        return 1.0
    if not s or not t:
        return 0.0
    window = max(len(s), len(t)) // 2 - 1
    s_hit = [False] * len(s)
    t_hit = [False] * len(t)
    matches = 0
    for i, cs in enumerate(s):
        lo = max(0, i - window)
        hi = min(len(t), i + window + 1)
        for j in range(lo, hi):
            if not t_hit[j] and t[j] == cs:
                s_hit[i] = t_hit[j] = True
                matches += 1
                break
    if matches == 0:
        return 0.0
    transpositions = 0
    j = 0
    for i, hit in enumerate(s_hit):
        if not hit:
            continue
        while not t_hit[j]:
            j += 1
        if s[i] != t[j]:
            transpositions += 1
        j += 1
    transpositions //= 2
    m = float(matches)
    return (m / len(s) + m / len(t) + (m - transpositions) / m) / 3.0


def jaro_winkler_similarity(
    a: Name | str,
    b: Name | str,
    *,
    prefix_scale: float = 0.1,
    max_prefix: int = 4,
) -> float:
    """Jaro similarity with the Winkler common-prefix boost."""
    s, t = _text(a), _text(b)
    jaro = jaro_similarity(s, t)
    prefix = 0
    for cs, ct in zip(s, t):
        if cs != ct or prefix >= max_prefix:
            break
        prefix += 1
    return jaro + prefix * prefix_scale * (1.0 - jaro)


class OrderingKey(Enum):
    EDIT_ASCENDING = "edit"
    DAMERAU_ASCENDING = "dl"


_ORDERING_DISTANCES = {
    OrderingKey.EDIT_ASCENDING: edit_distance,
    OrderingKey.DAMERAU_ASCENDING: damerau_levenshtein,
}


@dataclass(frozen=True)
class OrderingFunction:
    """Total order over candidates: distance to the query ascending, with a
    lexicographic tie-break on the candidate name."""

    key: OrderingKey = OrderingKey.EDIT_ASCENDING

    def distance(self, query: Name | str, candidate: Name | str) -> int:
        return _ORDERING_DISTANCES[self.key](query, candidate)


def order_candidates(
    query: Name,
    candidates: list[Name],
    ordering: OrderingFunction = OrderingFunction(),
) -> list[Name]:
    """Stable total ordering of ``candidates`` relative to ``query``."""
    return sorted(
        candidates,
        key=lambda c: (ordering.distance(query, c), c.normalized),
    )
