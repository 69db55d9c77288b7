"""Sliding-window salience kernels.

Two interchangeable implementations of the same arithmetic: a numba
``@njit`` version (default) and a pure-numpy version. Set
``CSSM_DISABLE_NUMBA=1`` to force numpy; numpy is also used when numba is
not importable. Both accumulate in the same order (top-K values descending,
then query terms in order), so their outputs agree bit-for-bit.
"""

from __future__ import annotations

import os

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("CSSM_DISABLE_NUMBA", "").strip() not in ("1", "true", "yes")


# -- numpy --------------------------------------------------------------------

def _term_salience_numpy(row: np.ndarray, width: int, top_k: int, alpha: float) -> np.ndarray:
    n = row.shape[0]
    span = min(width, n)
    if n > width:
        win = sliding_window_view(row, width)
    else:
        win = row[None, :]
    take = min(top_k, span)
    if take == 0:
        return np.zeros(1)
    neg = -win
    if take < span:
        neg = np.partition(neg, take - 1, axis=1)[:, :take]
    top = -np.sort(neg, axis=1)[:, :take]
    total = np.zeros(top.shape[0])
    for k in range(take):
        total = total + top[:, k]
    return top[:, 0] + alpha * (total / top_k)


def window_scores_numpy(profile, weights, width, top_k, alpha):
    """Joint salience of every window start for one ``(ql, n)`` profile."""
    out = None
    for i in range(profile.shape[0]):
        term = weights[i] * _term_salience_numpy(profile[i], width, top_k, alpha)
        out = (np.zeros(term.shape[0]) + term) if out is None else out + term
    return out


def best_windows_numpy(flat, offsets, weights, width, top_k, alpha):
    n_docs = offsets.shape[0] - 1
    best = np.empty(n_docs)
    start = np.empty(n_docs, dtype=np.int64)
    for d in range(n_docs):
        s = window_scores_numpy(flat[:, offsets[d]:offsets[d + 1]], weights, width, top_k, alpha)
        j = int(np.argmax(s))
        best[d] = s[j]
        start[d] = j
    return best, start


# -- numba --------------------------------------------------------------------

def _njit(fn):
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


@_njit
def _insert_desc(buf, count, top_k, v):
    # buf[:count] sorted descending; returns new count
    if count < top_k:
        j = count
        count += 1
    elif v > buf[top_k - 1]:
        j = top_k - 1
    else:
        return count
    while j > 0 and buf[j - 1] < v:
        buf[j] = buf[j - 1]
        j -= 1
    buf[j] = v
    return count


@_njit
def _fill(buf, row, lo, hi, top_k):
    count = 0
    for j in range(lo, hi):
        count = _insert_desc(buf, count, top_k, row[j])
    return count


@_njit
def _term_salience_numba(row, width, top_k, alpha, weight, out):
    # out[p] += weight * salience of window starting at p
    n = row.shape[0]
    span = min(width, n)
    n_win = max(1, n - width + 1)
    buf = np.empty(top_k)
    count = _fill(buf, row, 0, span, top_k)
    for p in range(n_win):
        if p > 0:
            outgoing = row[p - 1]
            incoming = row[p + span - 1]
            if count < top_k or outgoing >= buf[top_k - 1]:
                count = _fill(buf, row, p, p + span, top_k)
            elif incoming > buf[top_k - 1]:
                count = _insert_desc(buf, count, top_k, incoming)
        if count == 0:
            sal = 0.0
        else:
            total = 0.0
            for k in range(count):
                total = total + buf[k]
            sal = buf[0] + alpha * (total / top_k)
        out[p] = out[p] + weight * sal


@_njit
def window_scores_numba(profile, weights, width, top_k, alpha):
    n = profile.shape[1]
    out = np.zeros(max(1, n - width + 1))
    for i in range(profile.shape[0]):
        _term_salience_numba(profile[i], width, top_k, alpha, weights[i], out)
    return out


@_njit
def best_windows_numba(flat, offsets, weights, width, top_k, alpha):
    n_docs = offsets.shape[0] - 1
    best = np.empty(n_docs)
    start = np.empty(n_docs, dtype=np.int64)
    for d in range(n_docs):
        s = window_scores_numba(flat[:, offsets[d]:offsets[d + 1]], weights, width, top_k, alpha)
        j = 0
        for p in range(1, s.shape[0]):
            if s[p] > s[j]:
                j = p
        best[d] = s[j]
        start[d] = j
    return best, start


IMPLEMENTATIONS = {"numpy": (window_scores_numpy, best_windows_numpy)}
if HAVE_NUMBA:
    IMPLEMENTATIONS["numba"] = (window_scores_numba, best_windows_numba)

BACKEND = "numba" if USE_NUMBA else "numpy"
window_scores, best_windows = IMPLEMENTATIONS[BACKEND]
