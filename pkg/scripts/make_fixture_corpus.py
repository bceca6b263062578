#!/usr/bin/env python3
"""Generate an offline demo corpus: 50 names, fixture audio, ground truth.

Ten sound-alike pairs share rendered audio (one copy perturbed by 0.1% in
amplitude); thirty filler names get distinct audio. Output layout:

    <out>/audio/<name>.<lang>.wav
    <out>/corpus.txt
    <out>/truth.csv

Everything is deterministic, so re-running reproduces identical bytes.
"""

import argparse
from pathlib import Path

import numpy as np

from namesound import AudioClip, encode_wav, render_name_tones

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

PERTURBATION = 1.001


def build(out: Path, language: str) -> None:
    audio_dir = out / "audio"
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
        (audio_dir / f"{name}.{language}.wav").write_bytes(
            encode_wav(render_name_tones(name))
        )

    names = sorted(n for pair in CLUSTERS for n in pair) + sorted(FILLERS)
    (out / "corpus.txt").write_text(
        "# synthetic demo corpus\n" + "\n".join(sorted(names)) + "\n", encoding="utf-8"
    )
    rows = ["name,synonym"]
    for a, b in CLUSTERS:
        rows.append(f"{a},{b}")
        rows.append(f"{b},{a}")
    (out / "truth.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    print(f"wrote {len(names)} names, {len(CLUSTERS)} planted pairs -> {out}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo_corpus", help="output directory")
    parser.add_argument("--lang", default="en")
    args = parser.parse_args()
    build(Path(args.out), args.lang)


if __name__ == "__main__":
    main()
