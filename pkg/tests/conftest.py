"""Shared fixtures: a deterministic 50-name corpus with fixture audio.

Ten sound-alike pairs are planted by giving both members of a pair the
same rendered audio, one copy perturbed by 0.1% in amplitude; thirty
filler names get their own (distinct) audio. Everything is generated
offline from letter-pitch tone sequences, so the suite needs no network
and no real TTS.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

from namesound import (
    AudioClip,
    Embedding,
    NameCorpus,
    SynonymTruth,
    VectorIndex,
    build_index,
    encode_wav,
    load_corpus,
    load_ground_truth,
    mel_grid_embedding,
    normalize_name,
    render_name_tones,
)
from namesound.speech import SpokenNameKey

CLUSTERS = [
    ("beatrice", "beatrix"),
    ("victoria", "viktoria"),
    ("catherine", "katherine"),
    ("elisabeth", "elizabeth"),
    ("philip", "phillip"),
    ("stephen", "steven"),
    ("anna", "ana"),
    ("sarah", "sara"),
    ("john", "johan"),
    ("martha", "marta"),
]

FILLERS = [
    "xavier", "quentin", "ursula", "yolanda", "bjorn", "giuseppe",
    "margaret", "nicholas", "vladimir", "francesca", "wiktoria", "dmitri",
    "svetlana", "gwendolyn", "leonardo", "hector", "ingrid", "olga",
    "padraig", "rosalind", "tobias", "umberto", "fiona", "kenji",
    "amara", "chidi", "zofia", "ravi", "luciana", "edmund",
]

LANGUAGE = "en"
PERTURBATION = 1.001  # 0.1% amplitude difference between planted partners


@dataclass(frozen=True)
class FixtureSet:
    root: Path
    audio_dir: Path
    corpus_path: Path
    truth_path: Path
    corpus: NameCorpus
    truth: SynonymTruth


def cluster_names() -> list[str]:
    return [n for pair in CLUSTERS for n in pair]


def write_fixture_audio(audio_dir: Path, language: str = LANGUAGE) -> None:
    audio_dir.mkdir(parents=True, exist_ok=True)
    for base, partner in CLUSTERS:
        clip = render_name_tones(base)
        (audio_dir / f"{base}.{language}.wav").write_bytes(encode_wav(clip))
        perturbed = AudioClip(
            samples=np.clip(clip.samples * PERTURBATION, -1.0, 1.0),
            sample_rate=clip.sample_rate,
        )
        (audio_dir / f"{partner}.{language}.wav").write_bytes(encode_wav(perturbed))
    for name in FILLERS:
        clip = render_name_tones(name)
        (audio_dir / f"{name}.{language}.wav").write_bytes(encode_wav(clip))


def write_fixture_corpus(path: Path) -> None:
    lines = ["# synthetic fixture corpus"]
    lines.extend(sorted(cluster_names() + FILLERS))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_fixture_truth(path: Path) -> None:
    rows = ["name,synonym"]
    for a, b in CLUSTERS:
        rows.append(f"{a},{b}")
        rows.append(f"{b},{a}")
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")


@pytest.fixture(scope="session")
def fixture_set(tmp_path_factory) -> FixtureSet:
    root = tmp_path_factory.mktemp("fixture_set")
    audio_dir = root / "audio"
    corpus_path = root / "corpus.txt"
    truth_path = root / "truth.csv"
    write_fixture_audio(audio_dir)
    write_fixture_corpus(corpus_path)
    write_fixture_truth(truth_path)
    return FixtureSet(
        root=root,
        audio_dir=audio_dir,
        corpus_path=corpus_path,
        truth_path=truth_path,
        corpus=load_corpus(corpus_path),
        truth=load_ground_truth(truth_path),
    )


def _embed_fixture_audio(fixture: FixtureSet) -> list[Embedding]:
    from namesound import decode_wav

    embeddings = []
    for path in sorted(fixture.audio_dir.glob("*.wav")):
        name = normalize_name(path.stem.split(".")[0])
        clip = decode_wav(path.read_bytes())
        key = SpokenNameKey(name=name, language=LANGUAGE)
        embeddings.append(mel_grid_embedding(clip, key))
    return embeddings


@pytest.fixture(scope="session")
def mel_embeddings(fixture_set) -> list[Embedding]:
    return _embed_fixture_audio(fixture_set)


@pytest.fixture(scope="session")
def mel_index(mel_embeddings) -> VectorIndex:
    return build_index(mel_embeddings)


@pytest.fixture(scope="session")
def mel_store(fixture_set, mel_embeddings) -> Path:
    from namesound import save_embeddings

    path = fixture_set.root / "mel.tsv"
    if not path.exists():
        save_embeddings(path, mel_embeddings, language=LANGUAGE, accent="")
    return path
