"""Name ingestion: normalization, corpus files, and ground-truth synonym sets.

Corpus files are UTF-8 text with one raw name per line; ``#``-prefixed
lines are comments. Ground truth is a UTF-8 CSV with header
``name,synonym`` and one verified pair per row.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import (
    EmptyCorpusError,
    EmptyNameError,
    MalformedRowError,
    NameTooShortError,
)

log = logging.getLogger(__name__)

#: Corpus names shorter than this are rejected during ingestion. Ground-truth
#: keys and values are exempt (see load_ground_truth): retrieval queries such
#: as "ed" are legitimate even though they are too short to live in a corpus.
MIN_NAME_LENGTH = 3


@dataclass(frozen=True, order=True)
class Name:
    """A single forename/surname. Equality, hashing, and ordering use only
    the normalized form, so ``Name("anna", raw="Anna") == Name("anna")``."""

    normalized: str
    raw: str = field(default="", compare=False, repr=False)

    def __post_init__(self):
        if not self.raw:
            object.__setattr__(self, "raw", self.normalized)

    def __str__(self) -> str:
        return self.normalized


def normalize_name(raw: str, *, min_length: int = MIN_NAME_LENGTH) -> Name:
    """Trim and case-fold a raw string into a canonical Name.

    Raises EmptyNameError when nothing is left after trimming and
    NameTooShortError when the result has fewer than ``min_length``
    characters.
    """
    normalized = raw.strip().casefold()
    if not normalized:
        raise EmptyNameError("name is empty after trimming")
    if len(normalized) < min_length:
        raise NameTooShortError(
            f"name {raw!r} has fewer than {min_length} characters"
        )
    return Name(normalized=normalized, raw=raw)


@dataclass(frozen=True)
class CorpusReport:
    """Ingestion summary for one corpus file."""

    total_lines: int = 0
    comment_lines: int = 0
    rejected_lines: int = 0
    duplicate_lines: int = 0


@dataclass(frozen=True)
class NameCorpus:
    """An immutable, deduplicated, deterministically ordered set of names."""

    names: tuple[Name, ...]
    source_label: str = ""

    @classmethod
    def from_names(cls, names: Iterable[Name], source_label: str = "") -> "NameCorpus":
        unique = {n.normalized: n for n in names}
        ordered = tuple(unique[k] for k in sorted(unique))
        return cls(names=ordered, source_label=source_label)

    def __post_init__(self):
        normals = [n.normalized for n in self.names]
        if normals != sorted(set(normals)):
            raise ValueError("corpus names must be unique and sorted; use from_names()")
        object.__setattr__(self, "_lookup", frozenset(normals))

    def __iter__(self) -> Iterator[Name]:
        return iter(self.names)

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, item: Name | str) -> bool:
        key = item.normalized if isinstance(item, Name) else item
        return key in self._lookup  # type: ignore[attr-defined]


def read_corpus(path: str | Path, source_label: str | None = None) -> tuple[NameCorpus, CorpusReport]:
    """Load a corpus file, returning the corpus and an ingestion report."""
    path = Path(path)
    total = comments = rejected = duplicates = 0
    seen: dict[str, Name] = {}
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            total += 1
            stripped = line.strip()
            if stripped.startswith("#"):
                comments += 1
                continue
            try:
                name = normalize_name(line)
            except (EmptyNameError, NameTooShortError):
                if stripped:
                    rejected += 1
                continue
            if name.normalized in seen:
                duplicates += 1
            else:
                seen[name.normalized] = name
    if not seen:
        raise EmptyCorpusError(f"{path}: no valid names")
    corpus = NameCorpus.from_names(
        seen.values(), source_label=source_label if source_label is not None else str(path)
    )
    report = CorpusReport(total, comments, rejected, duplicates)
    return corpus, report


def load_corpus(path: str | Path, source_label: str | None = None) -> NameCorpus:
    """Load a corpus file; rejected/duplicate line counts are logged."""
    corpus, report = read_corpus(path, source_label)
    log.info(
        "loaded %d names from %s (%d rejected, %d duplicate lines)",
        len(corpus), path, report.rejected_lines, report.duplicate_lines,
    )
    return corpus


@dataclass(frozen=True)
class SynonymTruth:
    """Verified synonyms per query name. No entry maps a name to itself and
    every synonym set is non-empty."""

    entries: dict[Name, frozenset[Name]]

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, name: Name) -> bool:
        return name in self.entries

    def __getitem__(self, name: Name) -> frozenset[Name]:
        return self.entries[name]

    def queries(self) -> tuple[Name, ...]:
        return tuple(sorted(self.entries))


def load_ground_truth(path: str | Path) -> SynonymTruth:
    """Load a ``name,synonym`` CSV into a SynonymTruth.

    Keys and values are normalized without the corpus length filter (a
    two-letter query like "ed" may legitimately carry synonyms). Self-pairs
    are dropped and duplicate pairs merged silently.
    """
    path = Path(path)
    pairs: dict[Name, set[Name]] = {}
    duplicates = 0
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["name", "synonym"]:
            raise MalformedRowError(
                f"{path}: expected header 'name,synonym', got {header!r}", line_number=1
            )
        for row in reader:
            line_no = reader.line_num
            if len(row) != 2:
                raise MalformedRowError(
                    f"{path}:{line_no}: expected 2 fields, got {len(row)}", line_number=line_no
                )
            try:
                key = normalize_name(row[0], min_length=1)
                value = normalize_name(row[1], min_length=1)
            except EmptyNameError as exc:
                raise MalformedRowError(
                    f"{path}:{line_no}: empty field", line_number=line_no
                ) from exc
            if key == value:
                continue
            bucket = pairs.setdefault(key, set())
            if value in bucket:
                duplicates += 1
            else:
                bucket.add(value)
    entries = {k: frozenset(v) for k, v in pairs.items() if v}
    if duplicates:
        log.info("merged %d duplicate ground-truth pairs from %s", duplicates, path)
    return SynonymTruth(entries=entries)
