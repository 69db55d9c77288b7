"""Contextual-salience semantic matching for ad-hoc document ranking."""

from ._kernels import BACKEND
from .embeddings import EmbeddingTable, cosine, load_vectors, similarity_profile
from .evaluation import MetricReport, evaluate
from .index import InvertedIndex, bm25_score, build_index, co_occurrence, load_index, save_index
from .ranking import AggregationParams, Ranker, fuse_co_weighted, fuse_linear, rank_query
from .salience import (
    SalienceParams,
    WindowScore,
    document_salience,
    explain_profile,
    query_term_weights,
    term_window_salience,
    top_n_max,
)
from .text import Document, QrelEntry, Query, RunEntry, load_corpus, load_queries, read_qrels, tokenize, write_run

__version__ = "0.1.0"
