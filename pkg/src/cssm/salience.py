"""Contextual salience: locate the most query-related window of a document.

For each query term, the window score is the strongest cosine match in the
window plus ``alpha`` times the mean of the ``top_k`` strongest matches
(zero-padded when the window holds fewer). Terms are combined with softmax
weights over squared embedding norms, and the document keeps the window with
the largest combined score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .embeddings import EmbeddingTable, similarity_profile
from .text import Document, Query

DEFAULT_WINDOW = 30
DEFAULT_ALPHA = 0.1


def default_top_k(width: int) -> int:
    """max(1, floor(ln L) + 1); 4 at the default width of 30."""
    return max(1, math.floor(math.log(width)) + 1)


@dataclass(frozen=True)
class SalienceParams:
    width: int = DEFAULT_WINDOW
    alpha: float = DEFAULT_ALPHA
    top_k: int | None = None

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("window width must be >= 1")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.top_k is not None and self.top_k < 1:
            raise ValueError("top_k must be >= 1")

    @property
    def k(self) -> int:
        return self.top_k if self.top_k is not None else default_top_k(self.width)


@dataclass(frozen=True)
class WindowScore:
    start: int
    salience: float


@dataclass
class SalienceResult:
    best: WindowScore
    scores: np.ndarray = field(repr=False)

    @property
    def windows(self) -> list[WindowScore]:
        return [WindowScore(p, float(s)) for p, s in enumerate(self.scores)]


def top_n_max(values: Iterable[float], n: int) -> list[float]:
    """The ``n`` largest values, descending, padded with 0.0 up to length ``n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    top = sorted((float(v) for v in values), reverse=True)[:n]
    return top + [0.0] * (n - len(top))


def term_window_salience(row: Sequence[float], params: SalienceParams) -> float:
    """Salience of one query term over one window of similarities."""
    row = list(row)
    if len(row) > params.width:
        raise ValueError("window slice is longer than the window width")
    k = params.k
    top = top_n_max(row, k)
    total = 0.0
    for v in top:
        total = total + v
    return top[0] + params.alpha * (total / k)


def query_term_weights(query: Query, table: EmbeddingTable) -> np.ndarray:
    """Softmax over squared embedding norms; OOV terms count as norm 0."""
    return softmax_sq_norms(np.array([table.sq_norm(t) for t in query.terms]))


def softmax_sq_norms(sq_norms: np.ndarray) -> np.ndarray:
    x = np.asarray(sq_norms, dtype=np.float64)
    e = np.exp(x - x.max())
    return e / e.sum()


def document_salience(profile: np.ndarray, weights: np.ndarray, params: SalienceParams) -> SalienceResult:
    """Score every window start (stride 1) and keep the best; ties go to the earliest."""
    profile = np.ascontiguousarray(profile, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if profile.ndim != 2 or profile.shape[0] != weights.shape[0]:
        raise ValueError("profile must be (ql, doc_len) with one weight per row")
    scores = _kernels.window_scores(profile, weights, params.width, params.k, params.alpha)
    j = int(np.argmax(scores))
    return SalienceResult(WindowScore(j, float(scores[j])), scores)


def best_windows(flat: np.ndarray, offsets: np.ndarray, weights: np.ndarray,
                 params: SalienceParams) -> tuple[np.ndarray, np.ndarray]:
    """Batched ``document_salience``: documents are column ranges of ``flat``."""
    return _kernels.best_windows(np.ascontiguousarray(flat, dtype=np.float64),
                                 np.asarray(offsets, dtype=np.int64),
                                 np.ascontiguousarray(weights, dtype=np.float64),
                                 params.width, params.k, params.alpha)


def explain_profile(query: Query, doc: Document, table: EmbeddingTable,
                    params: SalienceParams = SalienceParams()) -> list[str]:
    """TSV lines (header first): per position, the term, each query term's
    cosine, and whether the position lies in the best window."""
    profile = similarity_profile(query, doc, table)
    res = document_salience(profile, query_term_weights(query, table), params)
    lo, hi = res.best.start, res.best.start + params.width
    cols = [f"s_q{i + 1}" for i in range(len(query.terms))]
    lines = ["\t".join(["pos", "term", *cols, "in_best_window"])]
    for j, term in enumerate(doc.tokens):
        sims = [f"{profile[i, j]:.6f}" for i in range(len(query.terms))]
        lines.append("\t".join([str(j), term, *sims, "1" if lo <= j < hi else "0"]))
    return lines
