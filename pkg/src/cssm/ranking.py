"""Fuse window salience with BM25 and rank documents per query."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .embeddings import EmbeddingTable, profile_columns
from .index import B, K1, InvertedIndex
from .salience import SalienceParams, best_windows, query_term_weights
from .text import Query, RunEntry

log = logging.getLogger(__name__)

MODES = ("bm25", "cssm-lf", "cssm-cw")
_MODE_ALIASES = {"bm25-only": "bm25"}

DEFAULT_BETA = 0.2
DEFAULT_DEPTH = 1000


@dataclass(frozen=True)
class AggregationParams:
    """``rerank_depth=None`` scores every document ("full" mode)."""

    beta: float = DEFAULT_BETA
    c: float = math.e
    mode: str = "cssm-lf"
    rerank_depth: int | None = DEFAULT_DEPTH
    k1: float = K1
    b: float = B

    def __post_init__(self):
        mode = _MODE_ALIASES.get(self.mode, self.mode)
        if mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")
        object.__setattr__(self, "mode", mode)
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        if self.c <= 0:
            raise ValueError("C must be > 0")
        if self.rerank_depth is not None and self.rerank_depth < 1:
            raise ValueError("rerank depth must be >= 1")


def fuse_linear(max_salience, bm25, params: AggregationParams):
    return max_salience + params.beta * bm25


def fuse_co_weighted(max_salience, bm25, co, params: AggregationParams):
    return np.log(co + params.c) * max_salience + params.beta * bm25


@dataclass
class Candidates:
    """Everything about a query's candidate pool that does not depend on
    alpha, beta or the window width; reusable across parameter sweeps."""

    query: Query
    positions: np.ndarray          # index positions, BM25 order
    bm25: np.ndarray
    co: np.ndarray
    profile: np.ndarray | None     # (ql, total tokens), documents concatenated
    offsets: np.ndarray | None
    weights: np.ndarray | None


@dataclass
class Ranking:
    query_id: str
    doc_ids: list[str]             # in rank order
    scores: np.ndarray
    salience: np.ndarray | None
    best_start: np.ndarray | None
    bm25: np.ndarray
    co: np.ndarray

    def run_entries(self, tag: str) -> list[RunEntry]:
        return [RunEntry(self.query_id, d, r, float(s) + 0.0, tag)
                for r, (d, s) in enumerate(zip(self.doc_ids, self.scores), 1)]


class Ranker:
    """Scores queries against an index, with optional embedding table."""

    def __init__(self, index: InvertedIndex, table: EmbeddingTable | None = None):
        self.index = index
        self.table = table
        self._ids: list[np.ndarray | None] = [None] * len(index)

    def _token_ids(self, pos: int) -> np.ndarray:
        ids = self._ids[pos]
        if ids is None:
            ids = self._ids[pos] = self.table.ids(self.index.tokens[pos])
        return ids

    def has_evidence(self, query: Query) -> bool:
        if any(t in self.index.postings for t in query.terms):
            return True
        return self.table is not None and any(t in self.table for t in query.terms)

    def candidates(self, query: Query, params: AggregationParams) -> Candidates:
        bm25_all = self.index.bm25_scores(query, params.k1, params.b)
        # index positions are in doc_id order, so a stable sort breaks ties by doc_id
        order = np.argsort(-bm25_all, kind="stable")
        if params.rerank_depth is not None:
            order = order[:params.rerank_depth]
        co = self.index.co_occurrence_counts(query)[order]
        profile = offsets = weights = None
        if params.mode != "bm25":
            if self.table is None:
                raise ValueError(f"mode {params.mode} needs an embedding table")
            if self.index.tokens is None:
                raise ValueError("index has no token streams; rebuild it with tokens")
            ids = [self._token_ids(p) for p in order]
            offsets = np.zeros(len(ids) + 1, dtype=np.int64)
            np.cumsum([len(x) for x in ids], out=offsets[1:])
            flat_ids = np.concatenate(ids) if ids else np.zeros(0, dtype=np.int64)
            sims, cols = profile_columns(query.terms, self.table, flat_ids)
            profile = np.ascontiguousarray(sims[:, cols])
            weights = query_term_weights(query, self.table)
        return Candidates(query, order, bm25_all[order], co, profile, offsets, weights)

    def score(self, cand: Candidates, sparams: SalienceParams, aparams: AggregationParams) -> Ranking:
        salience = start = None
        if aparams.mode == "bm25":
            scores = cand.bm25
        else:
            salience, start = best_windows(cand.profile, cand.offsets, cand.weights, sparams)
            if aparams.mode == "cssm-lf":
                scores = fuse_linear(salience, cand.bm25, aparams)
            else:
                scores = fuse_co_weighted(salience, cand.bm25, cand.co, aparams)
        order = np.lexsort((cand.positions, -scores))
        pick = lambda a: None if a is None else a[order]
        return Ranking(cand.query.query_id,
                       [self.index.doc_ids[p] for p in cand.positions[order]],
                       scores[order], pick(salience), pick(start),
                       cand.bm25[order], cand.co[order])

    def rank(self, query: Query, sparams: SalienceParams, aparams: AggregationParams) -> Ranking:
        if not self.has_evidence(query):
            log.warning("query %s: no indexed and no in-vocabulary terms; emitting no results",
                        query.query_id)
            empty = np.zeros(0)
            return Ranking(query.query_id, [], empty, None, None, empty, np.zeros(0, dtype=np.int64))
        return self.score(self.candidates(query, aparams), sparams, aparams)

    def rank_all(self, queries: Sequence[Query], sparams: SalienceParams,
                 aparams: AggregationParams, threads: int = 1) -> list[Ranking]:
        """Rank queries, optionally in a thread pool; output order follows ``queries``."""
        if threads <= 1 or len(queries) <= 1:
            return [self.rank(q, sparams, aparams) for q in queries]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda q: self.rank(q, sparams, aparams), queries))


def rank_query(query: Query, index: InvertedIndex, table: EmbeddingTable | None,
               sparams: SalienceParams = SalienceParams(),
               aparams: AggregationParams = AggregationParams(), tag: str | None = None) -> list[RunEntry]:
    ranking = Ranker(index, table).rank(query, sparams, aparams)
    return ranking.run_entries(tag or aparams.mode)
