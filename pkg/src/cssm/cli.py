"""Command-line interface: build-index, rank, eval, explain, sweep.

Exit codes: 0 success, 1 usage error, 2 data error. Default paths can be
supplied through CSSM_INDEX, CSSM_EMBEDDINGS, CSSM_QUERIES and CSSM_QRELS.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embeddings import load_vectors
from .evaluation import METRICS, evaluate
from .index import build_index, load_index, save_index
from .ranking import DEFAULT_BETA, DEFAULT_DEPTH, MODES, AggregationParams, Ranker
from .salience import DEFAULT_ALPHA, DEFAULT_WINDOW, SalienceParams, explain_profile
from .text import DataError, Query, iter_corpus, load_queries, read_qrels, read_run, tokenize, write_run

log = logging.getLogger("cssm")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    index: str | None = None
    embeddings: str | None = None
    queries: str | None = None
    qrels: str | None = None
    out: str | None = None
    mode: str = "cssm-lf"
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    window: int = DEFAULT_WINDOW
    top_k: int | None = None
    c: float = float(np.e)
    rerank_depth: int | None = DEFAULT_DEPTH
    tag: str | None = None
    threads: int | None = None

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise UsageError(f"{path}: unknown config keys: {', '.join(sorted(unknown))}")
        if data.get("rerank_depth") == "full":
            data["rerank_depth"] = None
        return cls(**data)

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(dataclasses.asdict(self), f, indent=2, sort_keys=True)
            f.write("\n")

    def salience_params(self) -> SalienceParams:
        return SalienceParams(width=self.window, alpha=self.alpha, top_k=self.top_k)

    def aggregation_params(self) -> AggregationParams:
        return AggregationParams(beta=self.beta, c=self.c, mode=self.mode,
                                 rerank_depth=self.rerank_depth)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _depth(value: str) -> int | str:
    if value == "full":
        return value
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a positive integer or 'full'") from None
    if n < 1:
        raise argparse.ArgumentTypeError("expected a positive integer or 'full'")
    return n


def _positive_int(value: str) -> int:
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {value!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _add_model_flags(p: argparse.ArgumentParser, with_mode: bool = True) -> None:
    p.add_argument("--config", help="JSON RunConfig file; flags override it")
    p.add_argument("--index", help="index directory [$CSSM_INDEX]")
    p.add_argument("--embeddings", help="GloVe text vectors [$CSSM_EMBEDDINGS]")
    if with_mode:
        p.add_argument("--mode", choices=MODES + ("bm25-only",))
        p.add_argument("--beta", type=float)
        p.add_argument("--c", type=float, help="CO weighting constant (default e)")
        p.add_argument("--rerank-depth", type=_depth, help="BM25 pool size or 'full'")
        p.add_argument("--threads", type=_positive_int, help="worker threads (default: cores)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--window", type=_positive_int)
    p.add_argument("--top-k", type=_positive_int, help="override K = floor(ln L) + 1")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cssm", description="Contextual-salience semantic matching ranker.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build-index", help="index a JSONL corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("rank", help="rank queries and write a TREC run")
    _add_model_flags(p)
    p.add_argument("--queries", help="TSV queries [$CSSM_QUERIES]")
    p.add_argument("--tag")
    p.add_argument("--out")

    p = sub.add_parser("eval", help="evaluate a run against qrels")
    p.add_argument("--qrels", help="TREC qrels [$CSSM_QRELS]")
    p.add_argument("--run", required=True)
    p.add_argument("--out")

    p = sub.add_parser("explain", help="per-position similarity profile of one document")
    _add_model_flags(p, with_mode=False)
    p.add_argument("--query-text", required=True)
    p.add_argument("--doc-id", required=True)
    p.add_argument("--out")

    p = sub.add_parser("sweep", help="metrics across values of one parameter")
    _add_model_flags(p)
    p.add_argument("--queries")
    p.add_argument("--qrels")
    p.add_argument("--param", required=True, choices=("alpha", "beta", "window"))
    p.add_argument("--values", required=True, nargs="+",
                   help="start:stop:step (inclusive) and/or comma-separated values")
    p.add_argument("--out")
    return parser


def parse_values(specs: list[str], integer: bool) -> list[float]:
    values: list[float] = []
    for spec in specs:
        for part in spec.split(","):
            part = part.strip()
            if not part:
                continue
            try:
                if ":" in part:
                    start, stop, step = (float(x) for x in part.split(":"))
                    if step <= 0:
                        raise UsageError(f"step must be positive in {part!r}")
                    n = int(np.floor((stop - start) / step + 1e-9)) + 1
                    values.extend(round(start + i * step, 10) for i in range(max(n, 0)))
                else:
                    values.append(float(part))
            except ValueError:
                raise UsageError(f"bad value spec {part!r}") from None
    if not values:
        raise UsageError("no sweep values given")
    if integer:
        if any(v != int(v) for v in values):
            raise UsageError("window values must be integers")
        values = [int(v) for v in values]
    return values


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.load(args.config) if getattr(args, "config", None) else RunConfig()
    for f in dataclasses.fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            setattr(cfg, f.name, v)
    if cfg.rerank_depth == "full":
        cfg.rerank_depth = None
    for name, env in (("index", "CSSM_INDEX"), ("embeddings", "CSSM_EMBEDDINGS"),
                      ("queries", "CSSM_QUERIES"), ("qrels", "CSSM_QRELS")):
        if getattr(cfg, name) is None and os.environ.get(env):
            setattr(cfg, name, os.environ[env])
    if cfg.threads is None:
        cfg.threads = os.cpu_count() or 1
    try:
        cfg.salience_params()
        cfg.aggregation_params()
    except ValueError as e:
        raise UsageError(str(e)) from None
    return cfg


def _require(cfg: RunConfig, *names: str) -> None:
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise UsageError("missing required setting(s): " + ", ".join("--" + n for n in missing))


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _load_model(cfg: RunConfig, need_table: bool) -> Ranker:
    index = load_index(cfg.index)
    table = load_vectors(cfg.embeddings) if need_table or cfg.embeddings else None
    return Ranker(index, table)


def cmd_build_index(args) -> int:
    index = build_index(iter_corpus(args.corpus))
    save_index(index, args.out)
    print(f"documents\t{index.doc_count}")
    print(f"vocabulary\t{len(index.postings)}")
    print(f"avg_doc_length\t{index.avg_doc_length:.4f}")
    return EXIT_OK


def cmd_rank(args) -> int:
    cfg = resolve_config(args)
    _require(cfg, "index", "queries", "out")
    aparams = cfg.aggregation_params()
    if aparams.mode != "bm25":
        _require(cfg, "embeddings")
    queries = load_queries(cfg.queries)
    ranker = _load_model(cfg, need_table=aparams.mode != "bm25")
    t0 = time.perf_counter()
    rankings = ranker.rank_all(queries, cfg.salience_params(), aparams, threads=cfg.threads)
    tag = cfg.tag or aparams.mode
    entries = [e for r in rankings for e in r.run_entries(tag)]
    write_run(entries, cfg.out)
    for r in rankings:
        top = r.doc_ids[0] if r.doc_ids else "-"
        window = str(int(r.best_start[0])) if r.best_start is not None and len(r.best_start) else "-"
        print(f"{r.query_id}\tcandidates={len(r.doc_ids)}\ttop={top}\tbest_window={window}")
    log.info("ranked %d queries in %.3fs", len(queries), time.perf_counter() - t0)
    return EXIT_OK


def cmd_eval(args) -> int:
    qrels_path = args.qrels or os.environ.get("CSSM_QRELS")
    if not qrels_path:
        raise UsageError("missing required setting(s): --qrels")
    report = evaluate(read_run(args.run), read_qrels(qrels_path))
    _emit(report.format(), args.out)
    return EXIT_OK


def cmd_explain(args) -> int:
    cfg = resolve_config(args)
    _require(cfg, "index", "embeddings")
    terms = tokenize(args.query_text)
    if not terms:
        raise UsageError("--query-text has no terms after tokenization")
    index = load_index(cfg.index)
    table = load_vectors(cfg.embeddings)
    try:
        doc = index.document(args.doc_id)
    except KeyError as e:
        raise DataError(str(e.args[0])) from None
    lines = explain_profile(Query("explain", tuple(terms)), doc, table, cfg.salience_params())
    _emit("".join(line + "\n" for line in lines), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = resolve_config(args)
    _require(cfg, "index", "queries", "qrels")
    base_s, base_a = cfg.salience_params(), cfg.aggregation_params()
    if base_a.mode != "bm25":
        _require(cfg, "embeddings")
    values = parse_values(args.values, integer=args.param == "window")
    settings = []
    try:
        for v in values:
            if args.param == "alpha":
                settings.append((v, dataclasses.replace(base_s, alpha=v), base_a))
            elif args.param == "window":
                settings.append((v, dataclasses.replace(base_s, width=v), base_a))
            else:
                settings.append((v, base_s, dataclasses.replace(base_a, beta=v)))
    except ValueError as e:
        raise UsageError(str(e)) from None
    queries = load_queries(cfg.queries)
    qrels = read_qrels(cfg.qrels)
    ranker = _load_model(cfg, need_table=base_a.mode != "bm25")
    # candidate pools and similarity profiles do not depend on the swept value
    pools = [ranker.candidates(q, base_a) if ranker.has_evidence(q) else None for q in queries]
    lines = ["\t".join(["param", "value", *METRICS])]
    for v, sp, ap in settings:
        run = []
        for pool in pools:
            if pool is not None:
                run.extend(ranker.score(pool, sp, ap).run_entries(ap.mode))
        means = evaluate(run, qrels).means
        lines.append("\t".join([args.param, f"{v:g}", *(f"{means[m]:.6f}" for m in METRICS)]))
    _emit("".join(line + "\n" for line in lines), args.out)
    return EXIT_OK


COMMANDS = {
    "build-index": cmd_build_index,
    "rank": cmd_rank,
    "eval": cmd_eval,
    "explain": cmd_explain,
    "sweep": cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"cssm: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError, ValueError, KeyError) as e:
        print(f"cssm: data error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
