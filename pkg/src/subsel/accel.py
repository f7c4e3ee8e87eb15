"""Hot numeric kernels: numba-jitted loops with a pure-numpy fallback.

The backend is chosen once at import time. Set ``SUBSEL_NUMBA=0`` in the
environment to force the numpy path; the numpy path is also used when
numba is not importable. Both variants of every kernel are exported
(``*_np`` / ``*_nb``) so the benchmark and the equivalence tests can run
them side by side.

Tie-breaking rules (lowest index wins) are implemented identically in
both paths so selections do not depend on the backend.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("SUBSEL_NUMBA", "1").strip().lower()
_WANT_NUMBA = _FLAG not in ("0", "false", "off", "no")

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


USE_NUMBA = HAVE_NUMBA and _WANT_NUMBA

_QUERY_CHUNK = 256


# ---------------------------------------------------------------------------
# pairwise kernels
# ---------------------------------------------------------------------------

def pairwise_shifted_cosine_np(x: np.ndarray, inv_norms: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    gram = x @ x.T
    sim = 0.5 * (1.0 + gram * np.outer(inv_norms, inv_norms))
    np.clip(sim, 0.0, 1.0, out=sim)
    # mirror the upper triangle so symmetry is exact despite BLAS ordering
    upper = np.triu(sim, 1)
    out = upper + upper.T
    np.fill_diagonal(out, 1.0)
    return out


@njit(cache=True)
def pairwise_shifted_cosine_nb(x, inv_norms):
    n = x.shape[0]
    d = x.shape[1]
    out = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        out[i, i] = 1.0
        for j in range(i + 1, n):
            acc = 0.0
            for t in range(d):
                acc += x[i, t] * x[j, t]
            s = 0.5 * (1.0 + acc * (inv_norms[i] * inv_norms[j]))
            if s < 0.0:
                s = 0.0
            elif s > 1.0:
                s = 1.0
            out[i, j] = s
            out[j, i] = s
    return out


def pairwise_euclidean_np(x: np.ndarray) -> np.ndarray:
    sq = np.einsum("ij,ij->i", x, x)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.clip(d2, 0.0, None, out=d2)
    dist = np.sqrt(d2)
    upper = np.triu(dist, 1)
    out = upper + upper.T
    np.fill_diagonal(out, 0.0)
    return out


@njit(cache=True)
def pairwise_euclidean_nb(x):
    n = x.shape[0]
    d = x.shape[1]
    out = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        out[i, i] = 0.0
        for j in range(i + 1, n):
            acc = 0.0
            for t in range(d):
                diff = x[i, t] - x[j, t]
                acc += diff * diff
            v = np.sqrt(acc)
            out[i, j] = v
            out[j, i] = v
    return out


# ---------------------------------------------------------------------------
# facility-location marginal gains
# ---------------------------------------------------------------------------

def facility_gains_dense_np(sim: np.ndarray, best: np.ndarray,
                            selected: np.ndarray) -> np.ndarray:
    gains = np.maximum(sim - best[:, None], 0.0).sum(axis=0)
    gains[selected] = -1.0
    return gains


@njit(cache=True)
def facility_gains_dense_nb(sim, best, selected):
    n = sim.shape[0]
    gains = np.empty(n, dtype=np.float64)
    for e in range(n):
        if selected[e]:
            gains[e] = -1.0
            continue
        acc = 0.0
        for i in range(n):
            diff = sim[i, e] - best[i]
            if diff > 0.0:
                acc += diff
        gains[e] = acc
    return gains


def facility_gain_single_np(sim_col: np.ndarray, best: np.ndarray) -> float:
    return float(np.maximum(sim_col - best, 0.0).sum())


@njit(cache=True)
def facility_gain_single_nb(sim_col, best):
    acc = 0.0
    for i in range(sim_col.shape[0]):
        diff = sim_col[i] - best[i]
        if diff > 0.0:
            acc += diff
    return acc


def facility_gains_sparse_np(n, col_ptr, entry_rows, entry_vals, entry_cols,
                             best, selected):
    # implicit unit diagonal first, then scatter-add the stored entries
    gains = np.maximum(1.0 - best, 0.0)
    contrib = np.maximum(entry_vals - best[entry_rows], 0.0)
    np.add.at(gains, entry_cols, contrib)
    gains[selected] = -1.0
    return gains


@njit(cache=True)
def facility_gains_sparse_nb(n, col_ptr, entry_rows, entry_vals, entry_cols,
                             best, selected):
    # entries within a column arrive in ascending row order; folding the
    # implicit diagonal in at row position e keeps the summation order
    # identical to the dense scan, so a nothing-dropped sparsification
    # reproduces dense gains bit for bit
    gains = np.empty(n, dtype=np.float64)
    for e in range(n):
        if selected[e]:
            gains[e] = -1.0
            continue
        acc = 0.0
        diag_done = False
        for p in range(col_ptr[e], col_ptr[e + 1]):
            r = entry_rows[p]
            if not diag_done and r > e:
                diff = 1.0 - best[e]
                if diff > 0.0:
                    acc += diff
                diag_done = True
            diff = entry_vals[p] - best[r]
            if diff > 0.0:
                acc += diff
        if not diag_done:
            diff = 1.0 - best[e]
            if diff > 0.0:
                acc += diff
        gains[e] = acc
    return gains


# ---------------------------------------------------------------------------
# k-nearest-neighbour voting
# ---------------------------------------------------------------------------

def knn_labels_np(train_x: np.ndarray, train_y: np.ndarray,
                  queries: np.ndarray, k: int, n_classes: int) -> np.ndarray:
    nq = queries.shape[0]
    preds = np.empty(nq, dtype=np.int64)
    for start in range(0, nq, _QUERY_CHUNK):
        stop = min(start + _QUERY_CHUNK, nq)
        chunk = queries[start:stop]
        d2 = ((chunk[:, None, :] - train_x[None, :, :]) ** 2).sum(axis=2)
        # stable sort keeps the lower training index first on distance ties
        order = np.argsort(d2, axis=1, kind="stable")[:, :k]
        for r in range(order.shape[0]):
            counts = np.bincount(train_y[order[r]], minlength=n_classes)
            preds[start + r] = int(counts.argmax())
    return preds


@njit(cache=True)
def knn_labels_nb(train_x, train_y, queries, k, n_classes):
    m = train_x.shape[0]
    d = train_x.shape[1]
    nq = queries.shape[0]
    preds = np.empty(nq, dtype=np.int64)
    d2 = np.empty(m, dtype=np.float64)
    used = np.empty(m, dtype=np.bool_)
    counts = np.empty(n_classes, dtype=np.int64)
    for q in range(nq):
        for j in range(m):
            acc = 0.0
            for t in range(d):
                diff = queries[q, t] - train_x[j, t]
                acc += diff * diff
            d2[j] = acc
            used[j] = False
        for c in range(n_classes):
            counts[c] = 0
        for _ in range(k):
            # strict < keeps the lowest index among exact distance ties
            bi = -1
            bv = np.inf
            for j in range(m):
                if not used[j] and d2[j] < bv:
                    bv = d2[j]
                    bi = j
            used[bi] = True
            counts[train_y[bi]] += 1
        bc = 0
        for c in range(1, n_classes):
            if counts[c] > counts[bc]:
                bc = c
        preds[q] = bc
    return preds


if USE_NUMBA:
    pairwise_shifted_cosine = pairwise_shifted_cosine_nb
    pairwise_euclidean = pairwise_euclidean_nb
    facility_gains_dense = facility_gains_dense_nb
    facility_gain_single = facility_gain_single_nb
    facility_gains_sparse = facility_gains_sparse_nb
    knn_labels = knn_labels_nb
else:
    pairwise_shifted_cosine = pairwise_shifted_cosine_np
    pairwise_euclidean = pairwise_euclidean_np
    facility_gains_dense = facility_gains_dense_np
    facility_gain_single = facility_gain_single_np
    facility_gains_sparse = facility_gains_sparse_np
    knn_labels = knn_labels_np
