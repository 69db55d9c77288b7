import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st
from hypothesis.extra.numpy import arrays

import reference
from cssm.embeddings import EmbeddingTable, similarity_profile
from cssm.salience import (
    SalienceParams,
    default_top_k,
    document_salience,
    explain_profile,
    query_term_weights,
    softmax_sq_norms,
    term_window_salience,
    top_n_max,
)
from cssm.text import Document, Query


@pytest.mark.parametrize("width, k", [(1, 1), (2, 1), (3, 2), (5, 2), (10, 3), (20, 3), (30, 4), (80, 5)])
def test_default_top_k(width, k):
    assert default_top_k(width) == k == reference.topk_default(width)
    assert SalienceParams(width=width).k == k


def test_params_validation():
    with pytest.raises(ValueError):
        SalienceParams(width=0)
    with pytest.raises(ValueError):
        SalienceParams(alpha=-0.1)
    with pytest.raises(ValueError):
        SalienceParams(top_k=0)
    assert SalienceParams(width=30, top_k=7).k == 7


def test_top_n_max_examples():
    assert top_n_max([0.9, 0.5, 0.7], 2) == [0.9, 0.7]
    assert top_n_max([], 3) == [0.0, 0.0, 0.0]
    assert top_n_max([-0.2], 2) == [-0.2, 0.0]
    assert top_n_max([0.5, 0.5, 0.1], 2) == [0.5, 0.5]
    with pytest.raises(ValueError):
        top_n_max([1.0], 0)


def test_top_n_max_against_full_sort():
    values = np.random.default_rng(3).uniform(size=1000)
    assert top_n_max(values, 5) == sorted(values.tolist(), reverse=True)[:5]


def test_term_window_salience_examples():
    p = SalienceParams(width=30, alpha=0.1, top_k=2)
    assert term_window_salience([0.9, 0.7, 0.2], p) == pytest.approx(0.98, abs=1e-15)
    assert term_window_salience([0.2, 0.9, 0.7], SalienceParams(alpha=0.0)) == 0.9
    assert term_window_salience([0.0] * 30, SalienceParams()) == 0.0
    with pytest.raises(ValueError):
        term_window_salience([0.1] * 31, SalienceParams(width=30))


@given(st.lists(st.floats(-1, 1), min_size=1, max_size=30), st.floats(0, 1))
def test_term_window_salience_upper_bound(row, alpha):
    p = SalienceParams(width=30, alpha=alpha)
    top1 = max(row)
    assert term_window_salience(row, p) <= top1 * (1 + alpha) + 1e-12 or top1 < 0


def _table(sq_norms):
    vecs = np.zeros((len(sq_norms), 2))
    vecs[:, 0] = np.sqrt(sq_norms)
    return EmbeddingTable([f"w{i}" for i in range(len(sq_norms))], vecs)


def test_query_term_weights_examples():
    t = _table([1.0, 0.0, 1.0])
    np.testing.assert_array_equal(query_term_weights(Query("q", ("w0",)), t), [1.0])
    np.testing.assert_allclose(query_term_weights(Query("q", ("w0", "w2")), t), [0.5, 0.5], atol=1e-15)
    g = query_term_weights(Query("q", ("w0", "oov")), t)
    e = math.e
    np.testing.assert_allclose(g, [e / (e + 1), 1 / (e + 1)], atol=1e-12)
    assert g[0] == pytest.approx(0.73106, abs=1e-5)


@given(arrays(np.float64, st.integers(1, 8), elements=st.floats(0, 700)))
def test_softmax_sums_to_one_and_positive(x):
    g = softmax_sq_norms(x)
    assert abs(g.sum() - 1) <= 1e-9
    assert np.all(g >= 0) and np.all(g <= 1)
    # a larger squared norm never gets a smaller weight
    order = np.argsort(x, kind="stable")
    assert np.all(np.diff(g[order]) >= 0)


def test_short_document_single_window(backend):
    prof = np.array([[0.1, 0.5, 0.3]])
    res = document_salience(prof, np.array([1.0]), SalienceParams(width=30))
    assert len(res.scores) == 1 and res.best.start == 0
    assert res.best.salience == pytest.approx(0.5 + 0.1 * (0.5 + 0.3 + 0.1) / 4)


def test_empty_document_scores_zero(backend):
    res = document_salience(np.zeros((2, 0)), np.array([0.5, 0.5]), SalienceParams())
    assert res.best.start == 0 and res.best.salience == 0.0


def test_uniform_profile_ties_to_first_window(backend):
    c, alpha = 0.4, 0.1
    prof = np.full((2, 50), c)
    res = document_salience(prof, np.array([0.3, 0.7]), SalienceParams(width=10, alpha=alpha))
    np.testing.assert_allclose(res.scores, c * (1 + alpha), atol=1e-15)
    assert len(res.windows) == 41 and res.best.start == 0


def test_random_profile_matches_window_enumeration(backend):
    rng = np.random.default_rng(11)
    prof = rng.uniform(-1, 1, size=(1, 50))
    params = SalienceParams(width=10, alpha=0.1, top_k=2)
    res = document_salience(prof, np.array([1.0]), params)
    oracle = reference.window_scores(prof.tolist(), [1.0], 10, 2, 0.1)
    assert len(oracle) == len(res.scores) == 41
    start, best = reference.best_window(prof.tolist(), [1.0], 10, 2, 0.1)
    assert res.best.start == start
    assert res.best.salience == best
    np.testing.assert_array_equal(res.scores, oracle)


profiles = st.integers(1, 4).flatmap(lambda ql: st.integers(0, 60).flatmap(
    lambda n: arrays(np.float64, (ql, n), elements=st.sampled_from([-0.5, 0.0, 0.2, 0.2, 0.7, 1.0])
                     | st.floats(-1, 1))))


@settings(max_examples=200, deadline=None)
@given(profiles, st.sampled_from([1, 2, 5, 10, 30]), st.sampled_from([0.0, 0.1, 0.4]),
       st.none() | st.integers(1, 6))
def test_backends_agree_with_oracle_bitwise(prof, width, alpha, top_k):
    from cssm import _kernels
    params = SalienceParams(width=width, alpha=alpha, top_k=top_k)
    g = softmax_sq_norms(np.arange(prof.shape[0], dtype=float))
    oracle = reference.window_scores(prof.tolist(), g.tolist(), width, params.k, alpha)
    for name, (scores, _) in _kernels.IMPLEMENTATIONS.items():
        np.testing.assert_allclose(scores(prof, g, width, params.k, alpha), oracle, rtol=0, atol=1e-12)
    a = [impl[0](prof, g, width, params.k, alpha) for impl in _kernels.IMPLEMENTATIONS.values()]
    for other in a[1:]:
        np.testing.assert_array_equal(a[0], other)


@settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(profiles, st.data())
def test_raising_a_similarity_never_lowers_best(backend, prof, data):
    if prof.shape[1] == 0:
        return
    params = SalienceParams(width=data.draw(st.sampled_from([1, 3, 10])), alpha=0.1)
    g = np.full(prof.shape[0], 1 / prof.shape[0])
    i = data.draw(st.integers(0, prof.shape[0] - 1))
    j = data.draw(st.integers(0, prof.shape[1] - 1))
    raised = prof.copy()
    raised[i, j] = data.draw(st.floats(prof[i, j], 1.0))
    assert (document_salience(raised, g, params).best.salience
            >= document_salience(prof, g, params).best.salience)


def test_batched_best_windows_match_per_document(backend):
    from cssm.salience import best_windows
    rng = np.random.default_rng(5)
    lengths = [0, 3, 30, 31, 77]
    profs = [rng.uniform(-1, 1, size=(2, n)) for n in lengths]
    offsets = np.concatenate([[0], np.cumsum(lengths)])
    g = np.array([0.25, 0.75])
    params = SalienceParams(width=30, alpha=0.2)
    best, start = best_windows(np.concatenate(profs, axis=1), offsets, g, params)
    for k, prof in enumerate(profs):
        res = document_salience(prof, g, params)
        assert best[k] == res.best.salience and start[k] == res.best.start


def _cluster_table(rng, d=8):
    """Query vector e plus orthogonal fillers."""
    basis, _ = np.linalg.qr(rng.normal(size=(d, d)))
    words = ["q"] + [f"f{i}" for i in range(d - 1)]
    return EmbeddingTable(words, basis.T * rng.uniform(0.5, 2.0, size=(d, 1)))


def test_clustered_matches_beat_scattered(backend):
    rng = np.random.default_rng(0)
    t = _cluster_table(rng)
    params = SalienceParams(width=10, alpha=0.1)
    filler = [f"f{i}" for i in rng.integers(0, 7, size=40)]
    near = filler[:5] + ["q", "q"] + filler[5:]
    far = filler[:5] + ["q"] + filler[5:20] + ["q"] + filler[20:]
    q = Query("x", ("q",))
    g = query_term_weights(q, t)
    s_near = document_salience(similarity_profile(q, Document("a", tuple(near)), t), g, params)
    s_far = document_salience(similarity_profile(q, Document("b", tuple(far)), t), g, params)
    assert s_near.best.salience > s_far.best.salience


def test_query_scaling_keeps_similarities_and_best_window(backend):
    rng = np.random.default_rng(2)
    words = [f"w{i}" for i in range(6)]
    vecs = rng.normal(size=(6, 4))
    doc = Document("d", tuple(rng.choice(words[2:], size=40)))
    q1 = Query("q", ("w0",))
    q2 = Query("q", ("w0", "w1"))
    base = EmbeddingTable(words, vecs)
    scaled_vecs = vecs.copy()
    scaled_vecs[:2] *= 3.0
    scaled = EmbeddingTable(words, scaled_vecs)
    np.testing.assert_allclose(similarity_profile(q2, doc, base), similarity_profile(q2, doc, scaled), atol=1e-12)
    g_base, g_scaled = query_term_weights(q2, base), query_term_weights(q2, scaled)
    assert np.argmax(g_base) == np.argmax(g_scaled)
    params = SalienceParams(width=8)
    r1 = document_salience(similarity_profile(q1, doc, base), query_term_weights(q1, base), params)
    r2 = document_salience(similarity_profile(q1, doc, scaled), query_term_weights(q1, scaled), params)
    assert r1.best.start == r2.best.start


def test_explain_profile_tsv():
    t = EmbeddingTable(["robot", "tech"], np.array([[1.0, 0.0], [0.0, 1.0]]))
    doc = Document("d", ("a", "robot", "tech", "b", "c"))
    lines = explain_profile(Query("q", ("robot", "tech")), doc, t, SalienceParams(width=2, alpha=0.0))
    assert lines[0] == "pos\tterm\ts_q1\ts_q2\tin_best_window"
    assert lines[2] == "1\trobot\t1.000000\t0.000000\t1"
    assert [line.split("\t")[-1] for line in lines[1:]] == ["0", "1", "1", "0", "0"]
