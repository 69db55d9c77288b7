"""Pre-trained word vectors and cosine similarity."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from .text import DataError, Document, Query


class EmbeddingTable:
    """Vocabulary -> dense vector map.

    Rows are L2-normalized once at construction so that a cosine is a dot
    product. One extra all-zero row (index ``oov_index``) stands in for
    out-of-vocabulary terms and zero-norm vectors, giving similarity 0.0.
    """

    def __init__(self, words: Sequence[str], vectors: np.ndarray):
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.ndim != 2 or len(words) != vectors.shape[0]:
            raise ValueError("vectors must be a (len(words), d) array")
        if vectors.shape[1] < 1:
            raise ValueError("dimension must be positive")
        self.vocab: dict[str, int] = {}
        for i, w in enumerate(words):
            if w in self.vocab:
                raise ValueError(f"duplicate word {w!r}")
            self.vocab[w] = i
        self.vectors = vectors
        self.dim = vectors.shape[1]
        self.sq_norms = np.einsum("ij,ij->i", vectors, vectors)
        norms = np.sqrt(self.sq_norms)
        unit = np.zeros((len(words) + 1, self.dim))
        nz = norms > 0
        unit[:-1][nz] = vectors[nz] / norms[nz, None]
        self.unit = unit
        self.oov_index = len(words)

    def __len__(self) -> int:
        return len(self.vocab)

    def __contains__(self, word: str) -> bool:
        return word in self.vocab

    def ids(self, terms: Sequence[str]) -> np.ndarray:
        """Row indices for ``terms``; OOV terms map to the zero row."""
        get, oov = self.vocab.get, self.oov_index
        return np.fromiter((get(t, oov) for t in terms), dtype=np.int64, count=len(terms))

    def sq_norm(self, term: str) -> float:
        i = self.vocab.get(term)
        return 0.0 if i is None else float(self.sq_norms[i])


def load_vectors(path: str | Path) -> EmbeddingTable:
    """Load GloVe-style text vectors: ``word f1 f2 ... fd`` per line, no header."""
    words: list[str] = []
    rows: list[list[float]] = []
    dim = None
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            parts = line.rstrip("\n").rstrip(" ").split(" ")
            if parts == [""]:
                continue
            where = f"{path}:{lineno}"
            if dim is None and len(parts) == 2 and parts[0].isdigit() and parts[1].isdigit():
                raise DataError(f"{where}: looks like a word2vec 'count dim' header; "
                                "GloVe text format has no header line")
            if len(parts) < 2:
                raise DataError(f"{where}: expected a word followed by floats")
            try:
                vec = [float(x) for x in parts[1:]]
            except ValueError:
                raise DataError(f"{where}: non-numeric vector component") from None
            if dim is None:
                dim = len(vec)
            elif len(vec) != dim:
                raise DataError(f"{where}: dimension {len(vec)} does not match {dim}")
            words.append(parts[0])
            rows.append(vec)
    if dim is None:
        raise DataError(f"{path}: no vectors found")
    try:
        return EmbeddingTable(words, np.array(rows, dtype=np.float64))
    except ValueError as e:
        raise DataError(f"{path}: {e}") from None


def cosine(a, b) -> float:
    """Cosine similarity clamped to [-1, 1]; 0.0 if either vector has zero norm."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("vectors must have the same dimension")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def profile_columns(terms: Sequence[str], table: EmbeddingTable, token_ids: np.ndarray):
    """Cosines of the query terms against the distinct rows in ``token_ids``.

    Returns ``(sims, cols)`` where ``sims[:, cols]`` is the similarity profile
    of the token sequence. Cheaper than a product against the full vocabulary
    when many documents share one query.
    """
    uniq, cols = np.unique(token_ids, return_inverse=True)
    q = table.unit[table.ids(terms)]
    sims = np.clip(q @ table.unit[uniq].T, -1.0, 1.0)
    return sims, cols.reshape(-1)


def similarity_profile(query: Query, doc: Document, table: EmbeddingTable) -> np.ndarray:
    """``(ql, len(doc))`` matrix of query-term / document-position cosines."""
    sims, cols = profile_columns(query.terms, table, table.ids(doc.tokens))
    return np.ascontiguousarray(sims[:, cols])
