"""Evaluation metrics, method comparison tables, and PCA export.

All metrics are macro-averaged over queries. ``accuracy`` is defined as
the macro average of precision@10 — in the comparison tables the two
columns coincide row by row, and no independent definition exists.
Per-query F1 combines per-query precision (hits over returned list
length) with per-query recall.

precision@k divides by k, not by min(k, list length): an over-filtering
method that returns two candidates cannot score a perfect precision@10.
Empty suggestion lists score zero.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .corpus import Name, NameCorpus, SynonymTruth
from .embed import Embedding, EmbeddingBackend
from .engine import (
    SuggestConfig,
    StringMetric,
    Suggestion,
    VectorIndex,
    suggest_phonetic,
    suggest_spoken,
    suggest_string,
)
from .errors import (
    DataError,
    DimensionMismatchError,
    EmptyTruthError,
    MissingTruthError,
    TooFewEmbeddingsError,
)
from .phonetics import PhoneticAlgorithm

PRECISION_KS = (1, 2, 3, 5, 10)

TABLE_COLUMNS = ("Method", "Accuracy", "F1", "AP@1", "AP@2", "AP@3", "AP@5", "AP@10", "Recall")


@dataclass(frozen=True)
class RunResult:
    """Ordered suggestions (names only) per query."""

    per_query: dict[Name, tuple[Name, ...]]

    def __post_init__(self):
        for query, suggestions in self.per_query.items():
            if query in suggestions:
                raise DataError(f"run lists query {query.normalized!r} as its own suggestion")
            if len(set(suggestions)) != len(suggestions):
                raise DataError(f"run has duplicate suggestions for {query.normalized!r}")

    def queries(self) -> tuple[Name, ...]:
        return tuple(sorted(self.per_query))


@dataclass(frozen=True)
class MetricsReport:
    n_queries: int
    accuracy: float
    f1: float
    precision_at: Mapping[int, float]
    recall: float


def precision_at_k(suggestions: Sequence[Name], truth: frozenset[Name] | set[Name], k: int) -> float:
    """Fraction of the first k suggestions that are verified synonyms."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not suggestions:
        return 0.0
    hits = sum(1 for s in suggestions[:k] if s in truth)
    return hits / k


def recall(suggestions: Sequence[Name], truth: frozenset[Name] | set[Name]) -> float:
    """Fraction of all verified synonyms present anywhere in the list."""
    if not truth:
        raise EmptyTruthError("recall is undefined for an empty truth set")
    hits = sum(1 for t in truth if t in set(suggestions))
    return hits / len(truth)


def evaluate_run(run: RunResult, truth: SynonymTruth) -> MetricsReport:
    """Macro-average per-query metrics over every query in the run."""
    if not run.per_query:
        raise DataError("run holds no queries")
    per_k_sums = {k: 0.0 for k in PRECISION_KS}
    recall_sum = 0.0
    f1_sum = 0.0
    for query, suggestions in run.per_query.items():
        if query not in truth:
            raise MissingTruthError(f"no ground truth for query {query.normalized!r}")
        truth_set = truth[query]
        for k in PRECISION_KS:
            per_k_sums[k] += precision_at_k(suggestions, truth_set, k)
        q_recall = recall(suggestions, truth_set)
        recall_sum += q_recall
        hits = sum(1 for s in suggestions if s in truth_set)
        q_precision = hits / len(suggestions) if suggestions else 0.0
        f1_sum += (
            2.0 * q_precision * q_recall / (q_precision + q_recall)
            if q_precision + q_recall > 0
            else 0.0
        )
    n = len(run.per_query)
    precision_at = {k: per_k_sums[k] / n for k in PRECISION_KS}
    return MetricsReport(
        n_queries=n,
        accuracy=precision_at[10],
        f1=f1_sum / n,
        precision_at=precision_at,
        recall=recall_sum / n,
    )


# --- method comparison --------------------------------------------------------

@dataclass(frozen=True)
class MethodSpec:
    """One column of a comparison: a suggestion method plus its knobs.

    ``method`` is one of: spoken, soundex, metaphone, dmetaphone, nysiis,
    mra, edit, dl, jw. The spoken method needs ``index``.
    """

    method: str
    k_out: int = 10
    threshold: float | None = None
    index: VectorIndex | None = None
    label: str | None = None

    @property
    def display_name(self) -> str:
        return self.label if self.label is not None else self.method


_PHONETIC_METHODS = {
    "soundex": PhoneticAlgorithm.SOUNDEX,
    "metaphone": PhoneticAlgorithm.METAPHONE,
    "dmetaphone": PhoneticAlgorithm.DOUBLE_METAPHONE,
    "nysiis": PhoneticAlgorithm.NYSIIS,
    "mra": PhoneticAlgorithm.MRA,
}

_STRING_METHODS = {
    "edit": StringMetric.EDIT,
    "dl": StringMetric.DAMERAU,
    "jw": StringMetric.JARO_WINKLER,
}

METHOD_NAMES = ("spoken", *_PHONETIC_METHODS, *_STRING_METHODS)


def _suggester(spec: MethodSpec, corpus: NameCorpus) -> Callable[[Name], list[Suggestion]]:
    if spec.method == "spoken":
        if spec.index is None:
            raise DataError("the spoken method needs an embedding index")
        cfg = SuggestConfig(
            k_out=spec.k_out,
            **({"distance_threshold": spec.threshold} if spec.threshold is not None else {}),
        )
        index = spec.index
        backend = EmbeddingBackend(index.backend)

        def spoken(query: Name) -> list[Suggestion]:
            if query not in index:
                raise DataError(f"query {query.normalized!r} has no embedding in the index")
            query_embedding = Embedding(backend=backend, vector=index.vector_for(query))
            return suggest_spoken(query, index, query_embedding, cfg)

        return spoken
    if spec.method in _PHONETIC_METHODS:
        algo = _PHONETIC_METHODS[spec.method]
        return lambda q: suggest_phonetic(q, corpus, algo, k_out=spec.k_out)
    if spec.method in _STRING_METHODS:
        metric = _STRING_METHODS[spec.method]
        return lambda q: suggest_string(q, corpus, metric, k_out=spec.k_out)
    raise DataError(f"unknown method {spec.method!r}; expected one of {METHOD_NAMES}")


def run_method(
    spec: MethodSpec,
    corpus: NameCorpus,
    queries: Sequence[Name],
    *,
    max_workers: int = 4,
) -> RunResult:
    """Run one method over the query set, producing names-only results.

    Queries are independent, so they run on a small thread pool; results
    are collected in query order, keeping output deterministic.
    """
    suggest = _suggester(spec, corpus)

    def one(query: Name) -> tuple[Name, ...]:
        return tuple(s.candidate for s in suggest(query))

    if max_workers > 1 and len(queries) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(one, queries))
    else:
        results = [one(q) for q in queries]
    return RunResult(per_query=dict(zip(queries, results)))


def comparison_queries(corpus: NameCorpus, truth: SynonymTruth) -> tuple[Name, ...]:
    """The shared query set for a comparison: truth keys present in the corpus."""
    return tuple(q for q in truth.queries() if q in corpus)


def compare_methods(
    corpus: NameCorpus,
    truth: SynonymTruth,
    methods: Sequence[MethodSpec],
) -> list[tuple[str, MetricsReport]]:
    """One MetricsReport row per method over the shared query set."""
    queries = comparison_queries(corpus, truth)
    if not queries:
        raise DataError("no ground-truth query appears in the corpus")
    rows = []
    for spec in methods:
        run = run_method(spec, corpus, queries)
        rows.append((spec.display_name, evaluate_run(run, truth)))
    return rows


def format_comparison(rows: Sequence[tuple[str, MetricsReport]]) -> str:
    """Render comparison rows as a TSV table in the standard column order."""
    lines = ["\t".join(TABLE_COLUMNS)]
    for label, report in rows:
        lines.append("\t".join([
            label,
            f"{report.accuracy:.4f}",
            f"{report.f1:.4f}",
            *(f"{report.precision_at[k]:.4f}" for k in PRECISION_KS),
            f"{report.recall:.4f}",
        ]))
    return "\n".join(lines) + "\n"


def per_query_rows(
    spec: MethodSpec, run: RunResult, truth: SynonymTruth
) -> list[tuple[str, str, int, float, float, float]]:
    """(method, query, n_suggestions, precision@1, precision@10, recall) rows."""
    rows = []
    for query in run.queries():
        suggestions = run.per_query[query]
        truth_set = truth[query]
        rows.append((
            spec.display_name,
            query.normalized,
            len(suggestions),
            precision_at_k(suggestions, truth_set, 1),
            precision_at_k(suggestions, truth_set, 10),
            recall(suggestions, truth_set),
        ))
    return rows


# --- PCA export -----------------------------------------------------------------

def pca_2d(embeddings: Sequence[Embedding]) -> list[tuple[Name, float, float]]:
    """Project embeddings onto their top-2 principal components.

    Components are eigenvectors of the sample covariance in descending
    eigenvalue order; each component is sign-fixed so its largest-magnitude
    entry is positive.
    """
    if len(embeddings) < 2:
        raise TooFewEmbeddingsError("PCA needs at least 2 embeddings")
    dim = embeddings[0].dim
    names = []
    for emb in embeddings:
        if emb.dim != dim:
            raise DimensionMismatchError("PCA input mixes dimensions")
        if emb.key is None:
            raise DataError("PCA input embedding lacks a name key")
        names.append(emb.key.name)
    matrix = np.stack([e.vector for e in embeddings])
    centered = matrix - matrix.mean(axis=0)
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:2] if vt.shape[0] >= 2 else np.vstack([vt, np.zeros((2 - vt.shape[0], dim))])
    for i in range(components.shape[0]):
        pivot = np.argmax(np.abs(components[i]))
        if components[i, pivot] < 0:
            components[i] = -components[i]
    coords = centered @ components.T
    if coords.shape[1] < 2:
        coords = np.hstack([coords, np.zeros((coords.shape[0], 2 - coords.shape[1]))])
    return [(name, float(x), float(y)) for name, (x, y) in zip(names, coords)]
