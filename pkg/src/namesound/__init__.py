"""namesound: similar-name suggestion from spoken-name audio embeddings,
with phonetic-encoding and string-distance baselines and an evaluation
harness."""

from .corpus import (
    Name,
    NameCorpus,
    SynonymTruth,
    load_corpus,
    load_ground_truth,
    normalize_name,
)
from .embed import (
    Embedding,
    EmbeddingBackend,
    handcrafted_embedding,
    load_embeddings,
    mel_grid_embedding,
    save_embeddings,
)
from .engine import (
    StringMetric,
    SuggestConfig,
    Suggestion,
    VectorIndex,
    build_index,
    knn,
    suggest_phonetic,
    suggest_spoken,
    suggest_string,
)
from .metrics import (
    MethodSpec,
    MetricsReport,
    RunResult,
    compare_methods,
    evaluate_run,
    pca_2d,
    precision_at_k,
    recall,
)
from .phonetics import (
    PhoneticAlgorithm,
    PhoneticCode,
    double_metaphone,
    encode,
    metaphone,
    mra,
    nysiis,
    soundex,
)
from .speech import (
    AudioClip,
    CommandBackend,
    FixtureBackend,
    SpokenNameKey,
    decode_wav,
    encode_wav,
    render_name_tones,
    resample,
    synthesize,
)
from .stringdist import (
    OrderingFunction,
    OrderingKey,
    damerau_levenshtein,
    edit_distance,
    jaro_winkler_similarity,
    order_candidates,
)

__version__ = "0.1.0"
