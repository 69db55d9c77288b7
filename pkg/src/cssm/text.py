"""Corpus, query, qrels and run-file I/O."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

_SPLIT = re.compile(r"[^0-9a-z]+")


class DataError(ValueError):
    """Raised for malformed input files."""


@dataclass(frozen=True)
class Document:
    doc_id: str
    tokens: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class Query:
    query_id: str
    terms: tuple[str, ...]


@dataclass(frozen=True)
class QrelEntry:
    query_id: str
    doc_id: str
    relevance: int


@dataclass(frozen=True)
class RunEntry:
    query_id: str
    doc_id: str
    rank: int
    score: float
    tag: str


def tokenize(text: str) -> list[str]:
    """Lowercase and split on anything that is not an ASCII letter or digit.

    No stemming and no stopword removal: pre-trained vectors are keyed by
    surface forms.
    """
    return [t for t in _SPLIT.split(text.lower()) if t]


def _check_id(value: object, what: str, where: str) -> str:
    if not isinstance(value, str) or not value:
        raise DataError(f"{where}: {what} must be a non-empty string")
    if any(c.isspace() for c in value):
        raise DataError(f"{where}: {what} {value!r} contains whitespace")
    return value


def iter_corpus(path: str | Path) -> Iterator[Document]:
    """Stream documents from a JSONL file of ``{"id": ..., "text": ...}``."""
    seen: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            where = f"{path}:{lineno}"
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataError(f"{where}: invalid JSON ({e.msg})") from None
            if not isinstance(rec, dict) or "id" not in rec or "text" not in rec:
                raise DataError(f"{where}: record needs 'id' and 'text' fields")
            doc_id = _check_id(rec["id"], "id", where)
            if not isinstance(rec["text"], str):
                raise DataError(f"{where}: 'text' must be a string")
            if doc_id in seen:
                raise DataError(f"{where}: duplicate document id {doc_id!r}")
            seen.add(doc_id)
            yield Document(doc_id, tuple(tokenize(rec["text"])))


def load_corpus(path: str | Path) -> list[Document]:
    return list(iter_corpus(path))


def load_queries(path: str | Path) -> list[Query]:
    """Read ``query_id<TAB>query text`` lines."""
    queries = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            where = f"{path}:{lineno}"
            if "\t" not in line:
                raise DataError(f"{where}: expected 'query_id<TAB>text'")
            qid, text = line.split("\t", 1)
            qid = _check_id(qid.strip(), "query id", where)
            if qid in seen:
                raise DataError(f"{where}: duplicate query id {qid!r}")
            seen.add(qid)
            terms = tokenize(text)
            if not terms:
                raise DataError(f"{where}: query {qid!r} has no terms after tokenization")
            queries.append(Query(qid, tuple(terms)))
    return queries


def read_qrels(path: str | Path) -> list[QrelEntry]:
    """Read TREC qrels (``qid iter docid rel``); the iteration column is ignored."""
    entries = []
    seen: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            parts = line.split()
            if not parts:
                continue
            where = f"{path}:{lineno}"
            if len(parts) != 4:
                raise DataError(f"{where}: expected 4 columns, got {len(parts)}")
            qid, _, docid, rel = parts
            try:
                relevance = int(rel)
            except ValueError:
                raise DataError(f"{where}: relevance {rel!r} is not an integer") from None
            if (qid, docid) in seen:
                raise DataError(f"{where}: duplicate judgment for ({qid}, {docid})")
            seen.add((qid, docid))
            entries.append(QrelEntry(qid, docid, relevance))
    return entries


def format_run_line(e: RunEntry) -> str:
    return f"{e.query_id} Q0 {e.doc_id} {e.rank} {e.score:.6f} {e.tag}\n"


def write_run(entries: Iterable[RunEntry], path: str | Path) -> None:
    # newline="" keeps "\n" line endings on every platform
    with open(path, "w", encoding="utf-8", newline="") as f:
        for e in entries:
            f.write(format_run_line(e))


def read_run(path: str | Path) -> list[RunEntry]:
    entries = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 6:
                raise DataError(f"{path}:{lineno}: expected 6 columns, got {len(parts)}")
            qid, _, docid, rank, score, tag = parts
            try:
                entries.append(RunEntry(qid, docid, int(rank), float(score), tag))
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad rank or score") from None
    return entries
