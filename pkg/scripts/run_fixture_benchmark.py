#!/usr/bin/env python3
"""End-to-end demo on the synthetic corpus: cache audio, extract embeddings,
and compare every suggestion method on the planted ground truth.

    python scripts/run_fixture_benchmark.py --work /tmp/namesound-demo

The comparison table lands on stdout; the work directory keeps the corpus,
audio, cache, and both embedding stores for further poking (e.g. the `pca`
subcommand).
"""

import argparse
from pathlib import Path

from make_fixture_corpus import build

from namesound.cli import main as namesound


def run(work: Path, language: str) -> int:
    build(work, language)
    corpus = work / "corpus.txt"
    truth = work / "truth.csv"
    cache = work / "cache"

    rc = namesound([
        "fetch-tts", "--corpus", str(corpus), "--lang", language,
        "--cache-dir", str(cache), "--fixture-dir", str(work / "audio"),
    ])
    if rc:
        return rc

    for backend in ("mel", "hand"):
        rc = namesound([
            "embed", "--backend", backend,
            "--audio-dir", str(cache), "--out", str(work / f"{backend}.tsv"),
            "--lang", language,
        ])
        if rc:
            return rc

    print("\n# spoken suggestions for 'beatrice'")
    rc = namesound([
        "suggest", "--method", "spoken", "--corpus", str(corpus),
        "--embeddings", str(work / "mel.tsv"), "beatrice",
    ])
    if rc:
        return rc

    print("\n# method comparison (mel-grid spoken embeddings)")
    return namesound([
        "compare", "--corpus", str(corpus), "--truth", str(truth),
        "--methods", "spoken,soundex,metaphone,dmetaphone,nysiis,mra,edit,dl,jw",
        "--embeddings", str(work / "mel.tsv"),
        "--per-query", str(work / "per_query.csv"),
    ])


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--work", default="demo_run", help="working directory")
    parser.add_argument("--lang", default="en")
    args = parser.parse_args()
    raise SystemExit(run(Path(args.work), args.lang))


if __name__ == "__main__":
    main()
