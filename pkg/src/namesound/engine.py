"""Embedding index, exact nearest-neighbor search, and suggestion pipelines.

Retrieval is deliberately exact: a brute-force Euclidean scan over the
whole index, with ties broken lexicographically by name so results are
identical across runs and platforms. Three pipelines produce ranked
suggestions for a query name:

* ``suggest_spoken`` — nearest neighbors in embedding space, filtered by a
  distance threshold, reordered by edit distance;
* ``suggest_phonetic`` — corpus names sharing the query's phonetic code
  (either code for Double Metaphone), ordered by edit distance;
* ``suggest_string`` — edit/Damerau windows or Jaro-Winkler top-k with an
  edit-distance reorder.

The query name itself never appears in its own suggestions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .corpus import Name, NameCorpus
from .embed import Embedding
from .errors import (
    DimensionMismatchError,
    DuplicateNameError,
    EmptyIndexError,
    NoEncodableContentError,
)
from .phonetics import PhoneticAlgorithm, encode
from .stringdist import (
    OrderingFunction,
    damerau_levenshtein,
    edit_distance,
    jaro_winkler_similarity,
)

#: Threshold on the Euclidean distance between query and candidate
#: embeddings. Candidates farther than this are considered to sound
#: different and are dropped before reordering.
DEFAULT_DISTANCE_THRESHOLD = 1.0
DEFAULT_K_NEIGHBORS = 10


@dataclass(frozen=True)
class VectorIndex:
    """Immutable matrix of (name, vector) pairs with homogeneous dimension."""

    names: tuple[Name, ...]
    vectors: np.ndarray     # (n, dim)
    backend: str

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: Name) -> bool:
        return name in self._positions  # type: ignore[attr-defined]

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float64)
        vectors.flags.writeable = False
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(
            self, "_positions", {name: i for i, name in enumerate(self.names)}
        )

    def vector_for(self, name: Name) -> np.ndarray:
        return self.vectors[self._positions[name]]  # type: ignore[attr-defined]


def build_index(embeddings: Sequence[Embedding]) -> VectorIndex:
    """Assemble an index; rejects empty input, mixed dims, duplicate names."""
    if not embeddings:
        raise EmptyIndexError("cannot build an index from zero embeddings")
    backend = embeddings[0].backend
    dim = embeddings[0].dim
    names: list[Name] = []
    seen: set[Name] = set()
    rows = np.empty((len(embeddings), dim), dtype=np.float64)
    for i, emb in enumerate(embeddings):
        if emb.dim != dim or emb.backend is not backend:
            raise DimensionMismatchError(
                f"embedding {i} has backend={emb.backend.value} dim={emb.dim}, "
                f"index has backend={backend.value} dim={dim}"
            )
        if emb.key is None:
            raise DuplicateNameError("embedding without a name key cannot be indexed")
        name = emb.key.name
        if name in seen:
            raise DuplicateNameError(f"duplicate name in index: {name.normalized!r}")
        seen.add(name)
        names.append(name)
        rows[i] = emb.vector
    return VectorIndex(names=tuple(names), vectors=rows, backend=backend.value)


def knn(
    index: VectorIndex,
    query_vector: np.ndarray,
    k: int,
    exclude: Name | None = None,
) -> list[tuple[Name, float]]:
    """Exact k nearest neighbors by Euclidean distance, ascending, with a
    lexicographic tie-break; ``exclude`` is removed before selection and
    ``k`` is clipped to the index size."""
    query = np.asarray(query_vector, dtype=np.float64).reshape(-1)
    if query.shape[0] != index.dim:
        raise DimensionMismatchError(
            f"query dim {query.shape[0]} != index dim {index.dim}"
        )
    if k < 1:
        raise ValueError("k must be >= 1")
    distances = np.linalg.norm(index.vectors - query, axis=1)
    pairs = [
        (name, float(d))
        for name, d in zip(index.names, distances)
        if exclude is None or name != exclude
    ]
    pairs.sort(key=lambda nd: (nd[1], nd[0].normalized))
    return pairs[:k]


@dataclass(frozen=True)
class SuggestConfig:
    """Knobs for the spoken-name pipeline."""

    k_neighbors: int = DEFAULT_K_NEIGHBORS
    distance_threshold: float = DEFAULT_DISTANCE_THRESHOLD
    ordering: OrderingFunction = OrderingFunction()
    k_out: int = DEFAULT_K_NEIGHBORS

    def __post_init__(self):
        if self.k_neighbors < 1 or self.k_out < 1:
            raise ValueError("k_neighbors and k_out must be >= 1")
        if self.distance_threshold < 0:
            raise ValueError("distance_threshold must be >= 0")


@dataclass(frozen=True)
class Suggestion:
    """One ranked candidate. ``ordering_score`` is the value the final sort
    used (edit distance for every shipped pipeline); ``embedding_distance``
    is present only for the spoken pipeline."""

    candidate: Name
    ordering_score: float
    rank: int
    embedding_distance: float | None = None


def _ranked(
    scored: list[tuple[Name, float, float | None]], k_out: int
) -> list[Suggestion]:
    scored.sort(key=lambda item: (item[1], item[0].normalized))
    return [
        Suggestion(candidate=name, ordering_score=score, rank=i + 1, embedding_distance=dist)
        for i, (name, score, dist) in enumerate(scored[:k_out])
    ]


def suggest_spoken(
    name: Name,
    index: VectorIndex,
    query_embedding: Embedding,
    cfg: SuggestConfig = SuggestConfig(),
) -> list[Suggestion]:
    """The spoken-name pipeline: take the query's nearest neighbors, drop
    those beyond the distance threshold, reorder the survivors."""
    neighbors = knn(index, query_embedding.vector, cfg.k_neighbors, exclude=name)
    survivors = [
        (cand, float(cfg.ordering.distance(name, cand)), dist)
        for cand, dist in neighbors
        if dist <= cfg.distance_threshold
    ]
    return _ranked(survivors, cfg.k_out)


def suggest_phonetic(
    name: Name,
    corpus: NameCorpus,
    algorithm: PhoneticAlgorithm,
    k_out: int = DEFAULT_K_NEIGHBORS,
) -> list[Suggestion]:
    """Suggest corpus names whose phonetic code collides with the query's.

    For Double Metaphone a candidate matches when either of its two codes
    equals either query code. Candidates are ordered by edit distance.
    """
    query_code = encode(name, algorithm)
    scored: list[tuple[Name, float, float | None]] = []
    for cand in corpus:
        if cand == name:
            continue
        try:
            cand_code = encode(cand, algorithm)
        except NoEncodableContentError:
            continue
        if cand_code.matches(query_code):
            scored.append((cand, float(edit_distance(name, cand)), None))
    return _ranked(scored, k_out)


class StringMetric(Enum):
    EDIT = "edit"
    DAMERAU = "dl"
    JARO_WINKLER = "jw"


#: The window of acceptable edit distances for the edit/Damerau pipelines;
#: distance 0 (the query itself) is excluded and anything above 3 is noise.
EDIT_WINDOW = (1, 3)


def suggest_string(
    name: Name,
    corpus: NameCorpus,
    metric: StringMetric,
    k_out: int = DEFAULT_K_NEIGHBORS,
) -> list[Suggestion]:
    """String-similarity baselines.

    Edit/Damerau: keep candidates at distance 1..3, nearest first.
    Jaro-Winkler: take the top ``k_out`` by similarity descending, then
    reorder those few by edit distance ascending.
    """
    if metric is StringMetric.JARO_WINKLER:
        pool = [
            (cand, jaro_winkler_similarity(name, cand))
            for cand in corpus
            if cand != name
        ]
        pool.sort(key=lambda cs: (-cs[1], cs[0].normalized))
        scored = [
            (cand, float(edit_distance(name, cand)), None)
            for cand, _ in pool[:k_out]
        ]
        return _ranked(scored, k_out)

    dist_fn = edit_distance if metric is StringMetric.EDIT else damerau_levenshtein
    low, high = EDIT_WINDOW
    scored = [
        (cand, float(d), None)
        for cand in corpus
        if cand != name and low <= (d := dist_fn(name, cand)) <= high
    ]
    return _ranked(scored, k_out)
