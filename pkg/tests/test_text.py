import json
import re

import pytest
from hypothesis import given, strategies as st

from cssm.text import (
    DataError,
    RunEntry,
    format_run_line,
    load_corpus,
    load_queries,
    read_qrels,
    read_run,
    tokenize,
    write_run,
)


def _regex_oracle(text):
    return [t for t in re.split(r"[^a-z0-9]", text.lower()) if t != ""]


@pytest.mark.parametrize("text, expected", [
    ("Robot technology!", ["robot", "technology"]),
    ("", []),
    ("state-of-the-art AI", ["state", "of", "the", "art", "ai"]),
    ("  CO2  emissions,2019 ", ["co2", "emissions", "2019"]),
])
def test_tokenize_examples(text, expected):
    assert tokenize(text) == expected
    assert _regex_oracle(text) == expected


@given(st.text())
def test_tokenize_matches_char_split_oracle(text):
    # no str.isalnum() here: only ASCII letters and digits count
    assert tokenize(text) == _regex_oracle(text)


@given(st.text())
def test_tokenize_idempotent(text):
    once = tokenize(text)
    assert tokenize(" ".join(once)) == once


def _write(path, lines):
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return path


def test_load_corpus(tmp_path):
    p = _write(tmp_path / "c.jsonl", [json.dumps({"id": "d1", "text": "Robot arms"}),
                                      json.dumps({"id": "d2", "text": ""})])
    docs = load_corpus(p)
    assert [d.doc_id for d in docs] == ["d1", "d2"]
    assert docs[0].tokens == ("robot", "arms")
    assert docs[1].tokens == ()


def test_load_corpus_missing_text_names_line(tmp_path):
    p = _write(tmp_path / "c.jsonl", [json.dumps({"id": "d1", "text": "x"}), json.dumps({"id": "d2"})])
    with pytest.raises(DataError, match=r":2:"):
        load_corpus(p)


@pytest.mark.parametrize("bad", ["{not json", json.dumps(["id", "text"]), json.dumps({"id": "", "text": "x"}),
                                 json.dumps({"id": "a b", "text": "x"})])
def test_load_corpus_malformed(tmp_path, bad):
    with pytest.raises(DataError, match=r":1:"):
        load_corpus(_write(tmp_path / "c.jsonl", [bad]))


def test_load_corpus_duplicate_id(tmp_path):
    rec = json.dumps({"id": "d1", "text": "x"})
    with pytest.raises(DataError, match="duplicate"):
        load_corpus(_write(tmp_path / "c.jsonl", [rec, rec]))


def test_load_corpus_10k_preserves_ids(tmp_path):
    p = tmp_path / "big.jsonl"
    with open(p, "w") as f:
        for i in range(10_000):
            f.write(json.dumps({"id": f"doc{i}", "text": f"word{i % 7} text"}) + "\n")
    with open(p) as f:
        n_lines = sum(1 for _ in f)
    docs = load_corpus(p)
    assert len(docs) == n_lines == 10_000
    assert [d.doc_id for d in docs] == [f"doc{i}" for i in range(10_000)]


def test_load_queries(tmp_path):
    p = _write(tmp_path / "q.tsv", ["301\tRobot technology", "302\tarrested  development arrested"])
    qs = load_queries(p)
    assert qs[0].query_id == "301" and qs[0].terms == ("robot", "technology")
    assert qs[1].terms == ("arrested", "development", "arrested")


def test_load_queries_errors(tmp_path):
    with pytest.raises(DataError, match="TAB"):
        load_queries(_write(tmp_path / "a.tsv", ["301 robot"]))
    with pytest.raises(DataError, match="'302'"):
        load_queries(_write(tmp_path / "b.tsv", ["302\t!!! ---"]))


def test_read_qrels(tmp_path):
    p = _write(tmp_path / "qrels", ["301 0 d1 1", "301 0 d2 0", "302 Q0 d1 2"])
    q = read_qrels(p)
    assert [(e.query_id, e.doc_id, e.relevance) for e in q] == [("301", "d1", 1), ("301", "d2", 0), ("302", "d1", 2)]
    with pytest.raises(DataError, match=r":2: relevance"):
        read_qrels(_write(tmp_path / "bad", ["301 0 d1 1", "301 0 d2 yes"]))


def test_write_run_format(tmp_path):
    entries = [RunEntry("q1", "d3", 1, 1.5, "cssm"), RunEntry("q1", "d1", 2, 1 / 3, "cssm")]
    p = tmp_path / "run"
    write_run(entries, p)
    assert p.read_bytes() == b"q1 Q0 d3 1 1.500000 cssm\nq1 Q0 d1 2 0.333333 cssm\n"


@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=20))
def test_run_roundtrip_is_byte_stable(tmp_path_factory, scores):
    d = tmp_path_factory.mktemp("run")
    scores = sorted(scores, reverse=True)
    entries = [RunEntry("q", f"d{i}", i + 1, s, "t") for i, s in enumerate(scores)]
    write_run(entries, d / "a")
    write_run(read_run(d / "a"), d / "b")
    assert (d / "a").read_bytes() == (d / "b").read_bytes()


def test_format_run_line_six_decimals():
    assert format_run_line(RunEntry("1", "x", 3, 2.0, "t")) == "1 Q0 x 3 2.000000 t\n"
