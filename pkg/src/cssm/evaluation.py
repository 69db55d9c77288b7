"""trec_eval-style effectiveness metrics: MAP, R-precision, P@k, NDCG@k.

Conventions follow trec_eval: relevance > 0 is relevant, unjudged documents
are non-relevant, and queries without any relevant judgment are left out of
the means. Queries judged but missing from the run score 0 everywhere.
The run is read in its rank order.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .text import QrelEntry, RunEntry

METRICS = ("map", "rp", "p@5", "p@20", "ndcg@5", "ndcg@20")


def average_precision(ranked: Sequence[str], qrels: Mapping[str, int]) -> float:
    n_rel = sum(1 for r in qrels.values() if r > 0)
    if n_rel == 0:
        return 0.0
    hits = 0
    total = 0.0
    for i, d in enumerate(ranked, 1):
        if qrels.get(d, 0) > 0:
            hits += 1
            total += hits / i
    return total / n_rel


def precision_at_k(ranked: Sequence[str], qrels: Mapping[str, int], k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    return sum(1 for d in ranked[:k] if qrels.get(d, 0) > 0) / k


def r_precision(ranked: Sequence[str], qrels: Mapping[str, int]) -> float:
    n_rel = sum(1 for r in qrels.values() if r > 0)
    return precision_at_k(ranked, qrels, n_rel) if n_rel else 0.0


def _dcg(gains: Iterable[float]) -> float:
    return sum(g / math.log2(i + 1) for i, g in enumerate(gains, 1))


def ndcg_at_k(ranked: Sequence[str], qrels: Mapping[str, int], k: int) -> float:
    ideal = _dcg(sorted((r for r in qrels.values() if r > 0), reverse=True)[:k])
    if ideal == 0:
        return 0.0
    return _dcg(max(qrels.get(d, 0), 0) for d in ranked[:k]) / ideal


def query_metrics(ranked: Sequence[str], qrels: Mapping[str, int]) -> dict[str, float]:
    return {
        "map": average_precision(ranked, qrels),
        "rp": r_precision(ranked, qrels),
        "p@5": precision_at_k(ranked, qrels, 5),
        "p@20": precision_at_k(ranked, qrels, 20),
        "ndcg@5": ndcg_at_k(ranked, qrels, 5),
        "ndcg@20": ndcg_at_k(ranked, qrels, 20),
    }


@dataclass
class MetricReport:
    per_query: dict[str, dict[str, float]] = field(default_factory=dict)

    @property
    def num_queries(self) -> int:
        return len(self.per_query)

    @property
    def means(self) -> dict[str, float]:
        n = len(self.per_query)
        return {m: (sum(v[m] for v in self.per_query.values()) / n if n else 0.0)
                for m in METRICS}

    def lines(self) -> list[str]:
        """``metric<TAB>qid<TAB>value`` rows; per-query first, then ``all``."""
        out = []
        for qid in sorted(self.per_query):
            for m in METRICS:
                out.append(f"{m}\t{qid}\t{self.per_query[qid][m]:.6f}")
        out.append(f"num_q\tall\t{self.num_queries}")
        for m, v in self.means.items():
            out.append(f"{m}\tall\t{v:.6f}")
        return out

    def format(self) -> str:
        return "".join(line + "\n" for line in self.lines())


def group_qrels(qrels: Iterable[QrelEntry]) -> dict[str, dict[str, int]]:
    grouped: dict[str, dict[str, int]] = defaultdict(dict)
    for q in qrels:
        grouped[q.query_id][q.doc_id] = q.relevance
    return dict(grouped)


def group_run(run: Iterable[RunEntry]) -> dict[str, list[str]]:
    by_query: dict[str, list[RunEntry]] = defaultdict(list)
    for e in run:
        by_query[e.query_id].append(e)
    ranked = {}
    for qid, entries in by_query.items():
        seen: set[str] = set()
        docs = []
        for e in sorted(entries, key=lambda e: e.rank):
            if e.doc_id not in seen:
                seen.add(e.doc_id)
                docs.append(e.doc_id)
        ranked[qid] = docs
    return ranked


def evaluate(run: Iterable[RunEntry], qrels: Iterable[QrelEntry]) -> MetricReport:
    judged = group_qrels(qrels)
    ranked = group_run(run)
    report = MetricReport()
    for qid in sorted(judged):
        if not any(r > 0 for r in judged[qid].values()):
            continue
        report.per_query[qid] = query_metrics(ranked.get(qid, []), judged[qid])
    return report
