"""Index construction, exact KNN, and the three suggestion pipelines."""

import numpy as np
import pytest

from namesound.corpus import Name, NameCorpus
from namesound.embed import Embedding, EmbeddingBackend
from namesound.engine import (
    SuggestConfig,
    StringMetric,
    VectorIndex,
    build_index,
    knn,
    suggest_phonetic,
    suggest_spoken,
    suggest_string,
)
from namesound.errors import (
    DimensionMismatchError,
    DuplicateNameError,
    EmptyIndexError,
    NoEncodableContentError,
)
from namesound.phonetics import PhoneticAlgorithm
from namesound.speech import SpokenNameKey
from namesound.stringdist import edit_distance


def hand_embedding(vector, name):
    padded = np.zeros(136)
    padded[: len(vector)] = vector
    key = SpokenNameKey(name=Name(name), language="en")
    return Embedding(backend=EmbeddingBackend.HANDCRAFTED, vector=padded, key=key)


def small_index(rows: dict[str, list[float]]) -> VectorIndex:
    return build_index([hand_embedding(v, n) for n, v in rows.items()])


# --- build_index ----------------------------------------------------------------

def test_build_index_counts():
    index = small_index({"anna": [1.0], "bob": [2.0], "cora": [3.0]})
    assert len(index) == 3
    assert index.dim == 136


def test_build_index_rejects_mixed_dims():
    good = hand_embedding([1.0], "anna")
    other = Embedding(
        backend=EmbeddingBackend.MEL_GRID,
        vector=np.zeros(12288),
        key=SpokenNameKey(name=Name("bob"), language="en"),
    )
    with pytest.raises(DimensionMismatchError):
        build_index([good, other])


def test_build_index_rejects_duplicates():
    with pytest.raises(DuplicateNameError):
        build_index([hand_embedding([1.0], "anna"), hand_embedding([2.0], "anna")])


def test_build_index_rejects_empty():
    with pytest.raises(EmptyIndexError):
        build_index([])


# --- knn --------------------------------------------------------------------------

def test_knn_self_match_first():
    index = small_index({"anna": [1.0, 0.0], "bob": [5.0, 0.0]})
    result = knn(index, index.vector_for(Name("anna")), k=2)
    assert result[0][0] == Name("anna")
    assert result[0][1] == 0.0


def test_knn_k_clipped_to_index_size():
    index = small_index({f"name{i:02d}": [float(i)] for i in range(5)})
    assert len(knn(index, index.vectors[0], k=100)) == 5


def test_knn_exclude():
    index = small_index({"anna": [1.0], "bob": [1.0]})
    result = knn(index, index.vector_for(Name("anna")), k=5, exclude=Name("anna"))
    assert [n.normalized for n, _ in result] == ["bob"]


def test_knn_lexicographic_tie_break():
    index = small_index({"zelda": [1.0], "anna": [1.0], "mira": [1.0]})
    result = knn(index, index.vector_for(Name("anna")), k=3)
    assert [n.normalized for n, _ in result] == ["anna", "mira", "zelda"]


def test_knn_dimension_check():
    index = small_index({"anna": [1.0]})
    with pytest.raises(DimensionMismatchError):
        knn(index, np.zeros(8), k=1)


def test_knn_matches_exhaustive_oracle():
    rng = np.random.default_rng(42)
    names = [f"name{i:04d}" for i in range(200)]
    vectors = rng.standard_normal((200, 8))
    index = VectorIndex(
        names=tuple(Name(n) for n in names), vectors=vectors, backend="hand"
    )
    for _ in range(20):
        query = rng.standard_normal(8)
        got = knn(index, query, k=10)
        oracle = sorted(
            ((Name(n), float(np.sqrt(((v - query) ** 2).sum()))) for n, v in zip(names, vectors)),
            key=lambda nd: (nd[1], nd[0].normalized),
        )[:10]
        assert [n for n, _ in got] == [n for n, _ in oracle]
        assert all(abs(d1 - d2) <= 1e-9 for (_, d1), (_, d2) in zip(got, oracle))


# --- suggest_spoken -----------------------------------------------------------------

def test_spoken_zero_distance_candidate_appears():
    index = small_index({"anna": [1.0, 2.0], "hana": [1.0, 2.0], "far": [50.0, 0.0]})
    query = Name("anna")
    emb = Embedding(
        backend=EmbeddingBackend.HANDCRAFTED, vector=index.vector_for(query)
    )
    result = suggest_spoken(query, index, emb, SuggestConfig())
    assert result[0].candidate == Name("hana")
    assert result[0].embedding_distance == 0.0
    assert result[0].rank == 1


def test_spoken_zero_threshold_filters_everything():
    index = small_index({"anna": [1.0], "bob": [2.0], "cora": [3.0]})
    query = Name("anna")
    emb = Embedding(backend=EmbeddingBackend.HANDCRAFTED, vector=index.vector_for(query))
    cfg = SuggestConfig(distance_threshold=0.0)
    assert suggest_spoken(query, index, emb, cfg) == []


def test_spoken_perturbed_partner_ranks_first(mel_index):
    query = Name("beatrice")
    emb = Embedding(
        backend=EmbeddingBackend.MEL_GRID, vector=mel_index.vector_for(query)
    )
    result = suggest_spoken(query, mel_index, emb, SuggestConfig())
    assert result, "no suggestions returned"
    assert result[0].candidate == Name("beatrix")
    assert result[0].embedding_distance <= 1.0


def test_spoken_threshold_monotonicity(mel_index):
    query = Name("victoria")
    emb = Embedding(
        backend=EmbeddingBackend.MEL_GRID, vector=mel_index.vector_for(query)
    )
    tight = suggest_spoken(query, mel_index, emb, SuggestConfig(distance_threshold=0.5))
    loose = suggest_spoken(query, mel_index, emb, SuggestConfig(distance_threshold=200.0))
    tight_names = {s.candidate for s in tight}
    loose_names = {s.candidate for s in loose}
    assert tight_names <= loose_names


def test_spoken_never_returns_query(mel_index):
    for name in mel_index.names:
        emb = Embedding(
            backend=EmbeddingBackend.MEL_GRID, vector=mel_index.vector_for(name)
        )
        for s in suggest_spoken(name, mel_index, emb, SuggestConfig()):
            assert s.candidate != name


def test_spoken_ranks_are_consecutive(mel_index):
    query = Name("john")
    emb = Embedding(
        backend=EmbeddingBackend.MEL_GRID, vector=mel_index.vector_for(query)
    )
    result = suggest_spoken(query, mel_index, emb, SuggestConfig(distance_threshold=1e9))
    assert [s.rank for s in result] == list(range(1, len(result) + 1))
    scores = [(s.ordering_score, s.candidate.normalized) for s in result]
    assert scores == sorted(scores)


# --- suggest_phonetic ----------------------------------------------------------------

ABRAHAM_CORPUS = NameCorpus.from_names(
    [Name(n) for n in ("abraham", "abrahan", "xavier", "robert")]
)


def test_phonetic_soundex_collision():
    result = suggest_phonetic(Name("abraham"), ABRAHAM_CORPUS, PhoneticAlgorithm.SOUNDEX)
    assert [s.candidate.normalized for s in result] == ["abrahan"]
    assert result[0].ordering_score == edit_distance("abraham", "abrahan")


def test_phonetic_unique_code_yields_empty():
    result = suggest_phonetic(Name("xavier"), ABRAHAM_CORPUS, PhoneticAlgorithm.SOUNDEX)
    assert result == []


def test_phonetic_double_metaphone_secondary_match():
    # jean codes (JN, AN); anne codes (AN, AN): matched via the secondary
    corpus = NameCorpus.from_names([Name(n) for n in ("jean", "anne", "robert")])
    result = suggest_phonetic(Name("jean"), corpus, PhoneticAlgorithm.DOUBLE_METAPHONE)
    assert Name("anne") in [s.candidate for s in result]


def test_phonetic_double_metaphone_cross_code_match():
    # smith (SM0, XMT) and schmidt (XMT, SMT) agree only across sides
    from namesound.phonetics import double_metaphone

    smith, schmidt = double_metaphone("smith"), double_metaphone("schmidt")
    assert smith.primary != schmidt.primary
    assert smith.secondary != schmidt.secondary
    assert smith.secondary == schmidt.primary
    corpus = NameCorpus.from_names([Name(n) for n in ("smith", "schmidt", "robert")])
    result = suggest_phonetic(Name("smith"), corpus, PhoneticAlgorithm.DOUBLE_METAPHONE)
    assert [s.candidate.normalized for s in result] == ["schmidt"]


def test_phonetic_query_excluded():
    result = suggest_phonetic(Name("abraham"), ABRAHAM_CORPUS, PhoneticAlgorithm.SOUNDEX)
    assert Name("abraham") not in [s.candidate for s in result]


def test_phonetic_unencodable_query():
    with pytest.raises(NoEncodableContentError):
        suggest_phonetic(Name("123"), ABRAHAM_CORPUS, PhoneticAlgorithm.SOUNDEX)


# --- suggest_string -------------------------------------------------------------------

def test_string_edit_window():
    corpus = NameCorpus.from_names([Name(n) for n in ("johan", "johnny", "xavier")])
    result = suggest_string(Name("john"), corpus, StringMetric.EDIT)
    assert [(s.candidate.normalized, s.ordering_score) for s in result] == [
        ("johan", 1.0),
        ("johnny", 2.0),
    ]


def test_string_excludes_exact_match():
    corpus = NameCorpus.from_names([Name(n) for n in ("john", "johan")])
    result = suggest_string(Name("john"), corpus, StringMetric.EDIT)
    assert Name("john") not in [s.candidate for s in result]


def test_string_jw_self_exclusion():
    corpus = NameCorpus.from_names([Name("anna")])
    assert suggest_string(Name("anna"), corpus, StringMetric.JARO_WINKLER) == []


def test_string_jw_reorders_by_edit():
    corpus = NameCorpus.from_names(
        [Name(n) for n in ("johan", "johnny", "johannes", "bob")]
    )
    result = suggest_string(Name("john"), corpus, StringMetric.JARO_WINKLER, k_out=3)
    scores = [(s.ordering_score, s.candidate.normalized) for s in result]
    assert scores == sorted(scores)
    assert len(result) <= 3


def test_string_damerau_counts_transposition():
    corpus = NameCorpus.from_names([Name("abdc")])
    edit = suggest_string(Name("abcd"), corpus, StringMetric.EDIT)
    damerau = suggest_string(Name("abcd"), corpus, StringMetric.DAMERAU)
    assert edit[0].ordering_score == 2.0
    assert damerau[0].ordering_score == 1.0
