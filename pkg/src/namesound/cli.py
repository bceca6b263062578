"""Command-line interface: ``namesound <subcommand>``.

Subcommands: encode, distance, fetch-tts, embed, suggest, evaluate,
compare, pca. Exit codes: 0 success, 1 usage error, 2 data error,
3 backend error.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

from . import metrics as metrics_mod
from .corpus import Name, load_corpus, load_ground_truth, normalize_name
from .embed import Embedding, EmbeddingBackend, extract, load_embeddings, save_embeddings
from .engine import (
    StringMetric,
    SuggestConfig,
    build_index,
    suggest_phonetic,
    suggest_spoken,
    suggest_string,
)
from .errors import BackendError, DataError
from .metrics import (
    MethodSpec,
    RunResult,
    compare_methods,
    evaluate_run,
    format_comparison,
    pca_2d,
    per_query_rows,
    run_method,
    comparison_queries,
)
from .phonetics import PhoneticAlgorithm, encode
from .speech import (
    CACHE_DIR_ENV,
    SpokenNameKey,
    backend_from_env,
    decode_wav,
    load_manifest,
    prefetch,
)
from .stringdist import damerau_levenshtein, edit_distance, jaro_winkler_similarity

USAGE_ERROR = 1
DATA_ERROR = 2
BACKEND_ERROR = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; the CLI contract reserves 2 for data
    errors, so usage problems exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="namesound", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", parents=[], help="print the phonetic code(s) for a name")
    p.add_argument("--algo", required=True,
                   choices=[a.value for a in PhoneticAlgorithm])
    p.add_argument("name")

    p = sub.add_parser("distance", help="print a string distance/similarity")
    p.add_argument("--metric", required=True, choices=["edit", "dl", "jw"])
    p.add_argument("a")
    p.add_argument("b")

    p = sub.add_parser("fetch-tts", help="pre-populate the spoken-audio cache for a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lang", required=True)
    p.add_argument("--accent", default="")
    p.add_argument("--cache-dir", default=os.environ.get(CACHE_DIR_ENV, ""))
    p.add_argument("--fixture-dir", default=None,
                   help="serve audio from this directory instead of a TTS command")
    p.add_argument("--jobs", type=int, default=4)

    p = sub.add_parser("embed", help="extract embeddings from a directory of WAV files")
    p.add_argument("--backend", required=True, choices=[b.value for b in EmbeddingBackend])
    p.add_argument("--audio-dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lang", default="en")
    p.add_argument("--accent", default="")

    p = sub.add_parser("suggest", help="suggest similar-sounding names for one query")
    p.add_argument("--method", required=True, choices=list(metrics_mod.METHOD_NAMES))
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("name")

    p = sub.add_parser("evaluate", help="score a suggestion run against ground truth")
    p.add_argument("--run", required=True, help="TSV rows: query<TAB>rank<TAB>candidate")
    p.add_argument("--truth", required=True)

    p = sub.add_parser("compare", help="compare methods on one corpus + ground truth")
    p.add_argument("--corpus", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--methods", required=True,
                   help="comma-separated subset of: " + ",".join(metrics_mod.METHOD_NAMES))
    p.add_argument("--embeddings", default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--per-query", default=None, help="write per-query metrics CSV here")

    p = sub.add_parser("pca", help="export 2-D PCA coordinates for an embedding store")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out", required=True)

    return parser


def _cmd_encode(args) -> int:
    name = normalize_name(args.name, min_length=1)
    code = encode(name, PhoneticAlgorithm(args.algo))
    for value in code.codes():
        print(value)
    return 0


def _cmd_distance(args) -> int:
    a = args.a.strip().casefold()
    b = args.b.strip().casefold()
    if args.metric == "edit":
        print(edit_distance(a, b))
    elif args.metric == "dl":
        print(damerau_levenshtein(a, b))
    else:
        print(f"{jaro_winkler_similarity(a, b):.6f}")
    return 0


def _cmd_fetch_tts(args) -> int:
    if not args.cache_dir:
        raise DataError(f"no cache directory: pass --cache-dir or set {CACHE_DIR_ENV}")
    corpus = load_corpus(args.corpus)
    backend = backend_from_env(args.fixture_dir)
    counts = prefetch(
        list(corpus), args.lang.lower(), args.accent.lower(), backend, args.cache_dir,
        max_workers=args.jobs,
    )
    print(f"synthesized\t{counts['synthesized']}", file=sys.stderr)
    print(f"failed\t{counts['failed']}", file=sys.stderr)
    return 0


def _iter_audio_files(audio_dir: Path):
    """Yield (name string, wav path). Hash-named cache layouts are resolved
    through the manifest; plain layouts take the first dot-field of the stem."""
    manifest = load_manifest(audio_dir)
    for path in sorted(audio_dir.rglob("*.wav")):
        stem = path.stem
        if manifest:
            digest = stem.split(".")[0]
            if digest in manifest:
                yield manifest[digest], path
                continue
        yield stem.split(".")[0], path


def _cmd_embed(args) -> int:
    audio_dir = Path(args.audio_dir)
    if not audio_dir.is_dir():
        raise DataError(f"not a directory: {audio_dir}")
    backend = EmbeddingBackend(args.backend)
    language, accent = args.lang.lower(), args.accent.lower()
    embeddings = []
    seen = set()
    for raw_name, path in _iter_audio_files(audio_dir):
        name = normalize_name(raw_name, min_length=1)
        if name in seen:
            continue
        seen.add(name)
        clip = decode_wav(path.read_bytes())
        key = SpokenNameKey(name=name, language=language, accent=accent)
        embeddings.append(extract(clip, backend, key))
    if not embeddings:
        raise DataError(f"no WAV files under {audio_dir}")
    save_embeddings(args.out, embeddings, language=language, accent=accent)
    print(f"embedded\t{len(embeddings)}", file=sys.stderr)
    return 0


def _spoken_spec(args) -> MethodSpec:
    if not args.embeddings:
        raise DataError("the spoken method needs --embeddings")
    index = build_index(load_embeddings(args.embeddings))
    return MethodSpec(
        method="spoken", k_out=args.k, threshold=args.threshold, index=index,
    )


def _cmd_suggest(args) -> int:
    corpus = load_corpus(args.corpus)
    query = normalize_name(args.name, min_length=1)
    if args.method == "spoken":
        spec = _spoken_spec(args)
        index = spec.index
        if query not in index:
            raise DataError(f"query {query.normalized!r} has no embedding in {args.embeddings}")
        cfg = SuggestConfig(
            k_out=args.k,
            **({"distance_threshold": args.threshold} if args.threshold is not None else {}),
        )
        emb = Embedding(backend=EmbeddingBackend(index.backend), vector=index.vector_for(query))
        suggestions = suggest_spoken(query, index, emb, cfg)
    elif args.method in ("edit", "dl", "jw"):
        suggestions = suggest_string(query, corpus, StringMetric(args.method), k_out=args.k)
    else:
        suggestions = suggest_phonetic(
            query, corpus, PhoneticAlgorithm(args.method), k_out=args.k
        )
    print("rank\tcandidate\tordering_score\tembedding_distance")
    for s in suggestions:
        distance = "" if s.embedding_distance is None else f"{s.embedding_distance:.6f}"
        print(f"{s.rank}\t{s.candidate.normalized}\t{s.ordering_score:g}\t{distance}")
    return 0


def _load_run(path: str) -> RunResult:
    rows: dict[Name, list[tuple[int, Name]]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataError(f"{path}:{line_no}: expected query<TAB>rank<TAB>candidate")
            query = normalize_name(parts[0], min_length=1)
            try:
                rank = int(parts[1])
            except ValueError as exc:
                raise DataError(f"{path}:{line_no}: bad rank {parts[1]!r}") from exc
            candidate = normalize_name(parts[2], min_length=1)
            rows.setdefault(query, []).append((rank, candidate))
    per_query = {
        q: tuple(c for _, c in sorted(pairs, key=lambda rc: rc[0]))
        for q, pairs in rows.items()
    }
    return RunResult(per_query=per_query)


def _cmd_evaluate(args) -> int:
    run = _load_run(args.run)
    truth = load_ground_truth(args.truth)
    report = evaluate_run(run, truth)
    print("n_queries\taccuracy\tf1\tap1\tap2\tap3\tap5\tap10\trecall")
    print("\t".join([
        str(report.n_queries),
        f"{report.accuracy:.4f}",
        f"{report.f1:.4f}",
        *(f"{report.precision_at[k]:.4f}" for k in metrics_mod.PRECISION_KS),
        f"{report.recall:.4f}",
    ]))
    return 0


def _cmd_compare(args) -> int:
    corpus = load_corpus(args.corpus)
    truth = load_ground_truth(args.truth)
    method_names = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not method_names:
        print("warning: no methods requested, empty table", file=sys.stderr)
        print("\t".join(metrics_mod.TABLE_COLUMNS))
        return 0
    specs = []
    for m in method_names:
        if m == "spoken":
            specs.append(_spoken_spec(args))
        elif m in metrics_mod.METHOD_NAMES:
            specs.append(MethodSpec(method=m, k_out=args.k))
        else:
            raise DataError(f"unknown method {m!r}")
    rows = compare_methods(corpus, truth, specs)
    sys.stdout.write(format_comparison(rows))
    if args.per_query:
        queries = comparison_queries(corpus, truth)
        with open(args.per_query, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["method", "query", "n_suggestions", "p1", "p10", "recall"])
            for spec in specs:
                run = run_method(spec, corpus, queries)
                for row in per_query_rows(spec, run, truth):
                    writer.writerow(row)
    return 0


def _cmd_pca(args) -> int:
    embeddings = load_embeddings(args.embeddings)
    coords = pca_2d(embeddings)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "x", "y"])
        for name, x, y in coords:
            writer.writerow([name.normalized, repr(x), repr(y)])
    print(f"wrote\t{len(coords)}", file=sys.stderr)
    return 0


_COMMANDS = {
    "encode": _cmd_encode,
    "distance": _cmd_distance,
    "fetch-tts": _cmd_fetch_tts,
    "embed": _cmd_embed,
    "suggest": _cmd_suggest,
    "evaluate": _cmd_evaluate,
    "compare": _cmd_compare,
    "pca": _cmd_pca,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except BackendError as exc:
        print(f"namesound: backend error: {exc}", file=sys.stderr)
        return BACKEND_ERROR
    except (DataError, OSError) as exc:
        print(f"namesound: data error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
