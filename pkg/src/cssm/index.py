"""Inverted index with Okapi BM25 and query-term co-occurrence counts.

On-disk layout (one directory, UTF-8, one record per line)::

    stats.tsv      cssm-index<TAB>1
                   doc_count<TAB>N
                   avg_doc_length<TAB>float
                   doc<TAB>doc_id<TAB>length      (one per document, sorted by id)
    postings.txt   term docid:tf docid:tf ...     (terms sorted, postings by doc id)
    documents.tsv  doc_id<TAB>space-joined tokens (token streams for window scoring)
"""

from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import Iterable

import numpy as np

from .text import DataError, Document, Query

FORMAT_NAME = "cssm-index"
FORMAT_VERSION = 1

K1 = 1.2
B = 0.75


class InvertedIndex:
    def __init__(self, doc_ids: list[str], doc_lengths: np.ndarray,
                 postings: dict[str, tuple[np.ndarray, np.ndarray]],
                 tokens: list[tuple[str, ...]] | None = None):
        self.doc_ids = doc_ids
        self.doc_pos = {d: i for i, d in enumerate(doc_ids)}
        self.doc_lengths = doc_lengths
        self.postings = postings
        self.tokens = tokens
        self.doc_count = len(doc_ids)
        self.avg_doc_length = float(doc_lengths.mean()) if len(doc_lengths) else 0.0

    def __len__(self) -> int:
        return self.doc_count

    def df(self, term: str) -> int:
        p = self.postings.get(term)
        return 0 if p is None else len(p[0])

    def idf(self, term: str) -> float:
        df = self.df(term)
        return float(np.log(1.0 + (self.doc_count - df + 0.5) / (df + 0.5)))

    def position(self, doc_id: str) -> int:
        try:
            return self.doc_pos[doc_id]
        except KeyError:
            raise KeyError(f"unknown document id {doc_id!r}") from None

    def tf(self, term: str, doc_id: str) -> int:
        p = self.postings.get(term)
        if p is None:
            return 0
        i = self.position(doc_id)
        j = np.searchsorted(p[0], i)
        return int(p[1][j]) if j < len(p[0]) and p[0][j] == i else 0

    def document(self, doc_id: str) -> Document:
        if self.tokens is None:
            raise ValueError("index was built without token streams")
        return Document(doc_id, self.tokens[self.position(doc_id)])

    def bm25_scores(self, query: Query, k1: float = K1, b: float = B) -> np.ndarray:
        """BM25 of ``query`` against every document, in ``doc_ids`` order.

        Repeated query terms contribute once per occurrence.
        """
        scores = np.zeros(self.doc_count)
        for term in query.terms:
            p = self.postings.get(term)
            if p is None:
                continue
            docs, tf = p
            tf = tf.astype(np.float64)
            norm = k1 * (1.0 - b + b * self.doc_lengths[docs] / self.avg_doc_length)
            scores[docs] += self.idf(term) * (tf * (k1 + 1.0)) / (tf + norm)
        return scores

    def co_occurrence_counts(self, query: Query) -> np.ndarray:
        """Number of distinct query terms present in each document."""
        co = np.zeros(self.doc_count, dtype=np.int64)
        for term in dict.fromkeys(query.terms):
            p = self.postings.get(term)
            if p is not None:
                co[p[0]] += 1
        return co


def build_index(corpus: Iterable[Document], keep_tokens: bool = True) -> InvertedIndex:
    docs = sorted(corpus, key=lambda d: d.doc_id)
    if not docs:
        raise ValueError("cannot index an empty corpus")
    doc_ids = [d.doc_id for d in docs]
    if len(set(doc_ids)) != len(doc_ids):
        raise ValueError("duplicate document ids in corpus")
    lengths = np.array([len(d.tokens) for d in docs], dtype=np.int64)
    acc: dict[str, tuple[list[int], list[int]]] = {}
    for i, d in enumerate(docs):
        for term, tf in Counter(d.tokens).items():
            entry = acc.get(term)
            if entry is None:
                entry = acc[term] = ([], [])
            entry[0].append(i)
            entry[1].append(tf)
    postings = {t: (np.array(ix, dtype=np.int64), np.array(tf, dtype=np.int64))
                for t, (ix, tf) in acc.items()}
    tokens = [d.tokens for d in docs] if keep_tokens else None
    return InvertedIndex(doc_ids, lengths, postings, tokens)


def bm25_score(index: InvertedIndex, query: Query, doc_id: str,
               k1: float = K1, b: float = B) -> float:
    """Okapi BM25 with idf = ln(1 + (N - df + 0.5) / (df + 0.5))."""
    i = index.position(doc_id)
    length = index.doc_lengths[i]
    score = 0.0
    for term in query.terms:
        tf = index.tf(term, doc_id)
        if tf == 0:
            continue
        tf = np.float64(tf)
        norm = k1 * (1.0 - b + b * length / index.avg_doc_length)
        score += index.idf(term) * (tf * (k1 + 1.0)) / (tf + norm)
    return float(score)


def co_occurrence(index: InvertedIndex, query: Query, doc_id: str) -> int:
    """Distinct query terms occurring at least once in the document."""
    index.position(doc_id)
    return sum(1 for t in set(query.terms) if index.tf(t, doc_id) > 0)


def save_index(index: InvertedIndex, path: str | Path) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    with open(path / "stats.tsv", "w", encoding="utf-8", newline="") as f:
        f.write(f"{FORMAT_NAME}\t{FORMAT_VERSION}\n")
        f.write(f"doc_count\t{index.doc_count}\n")
        f.write(f"avg_doc_length\t{index.avg_doc_length!r}\n")
        for d, n in zip(index.doc_ids, index.doc_lengths):
            f.write(f"doc\t{d}\t{n}\n")
    with open(path / "postings.txt", "w", encoding="utf-8", newline="") as f:
        for term in sorted(index.postings):
            docs, tfs = index.postings[term]
            items = " ".join(f"{index.doc_ids[i]}:{tf}" for i, tf in zip(docs, tfs))
            f.write(f"{term} {items}\n")
    if index.tokens is not None:
        with open(path / "documents.tsv", "w", encoding="utf-8", newline="") as f:
            for d, toks in zip(index.doc_ids, index.tokens):
                f.write(f"{d}\t{' '.join(toks)}\n")


def load_index(path: str | Path) -> InvertedIndex:
    path = Path(path)
    stats = path / "stats.tsv"
    if not stats.exists():
        raise DataError(f"{path}: not an index directory (missing stats.tsv)")
    doc_ids: list[str] = []
    lengths: list[int] = []
    with open(stats, encoding="utf-8") as f:
        header = f.readline().rstrip("\n").split("\t")
        if header != [FORMAT_NAME, str(FORMAT_VERSION)]:
            raise DataError(f"{stats}: unsupported index format {header!r}")
        meta = {}
        for lineno, line in enumerate(f, 2):
            parts = line.rstrip("\n").split("\t")
            if parts[0] == "doc" and len(parts) == 3:
                doc_ids.append(parts[1])
                lengths.append(int(parts[2]))
            elif len(parts) == 2:
                meta[parts[0]] = parts[1]
            else:
                raise DataError(f"{stats}:{lineno}: malformed record")
    if int(meta.get("doc_count", -1)) != len(doc_ids):
        raise DataError(f"{stats}: doc_count does not match document records")
    pos = {d: i for i, d in enumerate(doc_ids)}
    postings = {}
    with open(path / "postings.txt", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            term, *items = line.split()
            ix, tf = [], []
            for item in items:
                d, _, n = item.rpartition(":")
                if d not in pos:
                    raise DataError(f"{path / 'postings.txt'}:{lineno}: unknown doc {d!r}")
                ix.append(pos[d])
                tf.append(int(n))
            postings[term] = (np.array(ix, dtype=np.int64), np.array(tf, dtype=np.int64))
    tokens = None
    docs_file = path / "documents.tsv"
    if docs_file.exists():
        tokens = [()] * len(doc_ids)
        with open(docs_file, encoding="utf-8") as f:
            for line in f:
                d, _, text = line.rstrip("\n").partition("\t")
                tokens[pos[d]] = tuple(text.split())
    index = InvertedIndex(doc_ids, np.array(lengths, dtype=np.int64), postings, tokens)
    if repr(index.avg_doc_length) != meta.get("avg_doc_length"):
        raise DataError(f"{stats}: avg_doc_length does not match document lengths")
    return index
