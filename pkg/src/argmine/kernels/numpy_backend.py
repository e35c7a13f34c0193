"""Pure-NumPy linear-chain kernels.

Reference semantics for the numba twins in ``numba_backend``; every
function here has an identical signature and identical numerical
behaviour (same summation order, same tie rule) up to floating-point
library differences.

Conventions: ``K`` tags; emissions are [n, K]; transitions [K, K] with
entry (a, b) scoring a -> b; separate start/stop vectors. Sparse token
features arrive in CSR layout (indptr int64[n+1], indices int64[nnz])
against a weight matrix [n_features, K]. Ties in argmax resolve to the
lowest tag index.
"""

from __future__ import annotations

import numpy as np

NEG_INF = -np.inf


def emissions(indptr: np.ndarray, indices: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Per-token tag scores: sum of weight rows of each token's active features."""
    n = indptr.shape[0] - 1
    out = np.zeros((n, weights.shape[1]))
    for t in range(n):
        lo, hi = indptr[t], indptr[t + 1]
        if hi > lo:
            out[t] = weights[indices[lo:hi]].sum(axis=0)
    return out


def viterbi_path(
    emis: np.ndarray,
    trans: np.ndarray,
    start: np.ndarray,
    stop: np.ndarray,
    allowed_start: np.ndarray,
    allowed_trans: np.ndarray,
) -> tuple[np.ndarray, float]:
    """Highest-scoring tag sequence and its score.

    ``allowed_start``/``allowed_trans`` are boolean masks; disallowed
    entries are excluded from the search space (pass all-True masks for
    an unconstrained decode). Ties resolve to the lowest tag index at
    each backpointer choice, which selects the optimal path whose
    reversed tag tuple is lexicographically smallest.
    """
    n, K = emis.shape
    masked_trans = np.where(allowed_trans, trans, NEG_INF)
    delta = np.where(allowed_start, start + emis[0], NEG_INF)
    bp = np.zeros((n, K), dtype=np.int64)
    for t in range(1, n):
        cand = delta[:, None] + masked_trans
        best_prev = np.argmax(cand, axis=0)  # first max = lowest index on ties
        bp[t] = best_prev
        delta = cand[best_prev, np.arange(K)] + emis[t]
    final = delta + stop
    last = int(np.argmax(final))
    path = np.zeros(n, dtype=np.int64)
    path[n - 1] = last
    for t in range(n - 1, 0, -1):
        path[t - 1] = bp[t, path[t]]
    return path, float(final[last])


def forward_logz(
    emis: np.ndarray, trans: np.ndarray, start: np.ndarray, stop: np.ndarray
) -> float:
    """Log partition function via the forward recursion in log space."""
    n, _ = emis.shape
    alpha = start + emis[0]
    for t in range(1, n):
        scores = alpha[:, None] + trans
        m = scores.max(axis=0)
        alpha = m + np.log(np.exp(scores - m).sum(axis=0)) + emis[t]
    final = alpha + stop
    m = final.max()
    return float(m + np.log(np.exp(final - m).sum()))


def crf_chunk_grad(
    indptr: np.ndarray,
    indices: np.ndarray,
    weights: np.ndarray,
    trans: np.ndarray,
    start: np.ndarray,
    stop: np.ndarray,
    gold: np.ndarray,
    class_weights: np.ndarray,
    d_weights: np.ndarray,
    d_trans: np.ndarray,
    d_start: np.ndarray,
    d_stop: np.ndarray,
) -> float:
    """Class-weighted chunk loss; accumulates its gradient into d_*.

    The loss is the chain-rule decomposition of the sequence negative
    log-likelihood with each token's conditional term -log p(y_t | y_<t)
    scaled by the class weight of its gold tag. With all weights 1 this
    telescopes to the standard NLL. Gradients run reverse-mode through
    the backward recursion, all in log space.
    """
    emis = emissions(indptr, indices, weights)
    n, K = emis.shape

    # backward: beta[t, j] = log sum over suffixes after t given y_t = j
    beta = np.empty((n, K))
    beta[n - 1] = stop
    for t in range(n - 2, -1, -1):
        sc = trans + (emis[t + 1] + beta[t + 1])[None, :]
        m = sc.max(axis=1)
        beta[t] = m + np.log(np.exp(sc - m[:, None]).sum(axis=1))

    v0 = start + emis[0] + beta[0]
    m0 = v0.max()
    logz = m0 + np.log(np.exp(v0 - m0).sum())

    w0 = class_weights[gold[0]]
    loss = -w0 * (v0[gold[0]] - logz)
    for t in range(1, n):
        a, b = gold[t - 1], gold[t]
        loss -= class_weights[b] * (
            trans[a, b] + emis[t, b] + beta[t, b] - beta[t - 1, a]
        )

    # direct partials, with g the adjoint of beta
    d_emis = np.zeros((n, K))
    g = np.zeros((n, K))
    p0 = np.exp(v0 - logz)
    d_start += w0 * p0
    d_emis[0] += w0 * p0
    g[0] += w0 * p0
    d_start[gold[0]] -= w0
    d_emis[0, gold[0]] -= w0
    g[0, gold[0]] -= w0
    for t in range(1, n):
        a, b = gold[t - 1], gold[t]
        wt = class_weights[b]
        d_trans[a, b] -= wt
        d_emis[t, b] -= wt
        g[t, b] -= wt
        g[t - 1, a] += wt

    # backprop the backward recursion (runs forward in t)
    for t in range(n - 1):
        q = np.exp(trans + (emis[t + 1] + beta[t + 1])[None, :] - beta[t][:, None])
        gq = g[t][:, None] * q
        d_trans += gq
        col = gq.sum(axis=0)
        d_emis[t + 1] += col
        g[t + 1] += col
    d_stop += g[n - 1]

    for t in range(n):
        for a in range(indptr[t], indptr[t + 1]):
            d_weights[indices[a]] += d_emis[t]
    return float(loss)


def perceptron_step(
    indptr: np.ndarray,
    indices: np.ndarray,
    weights: np.ndarray,
    trans: np.ndarray,
    start: np.ndarray,
    stop: np.ndarray,
    u_weights: np.ndarray,
    u_trans: np.ndarray,
    u_start: np.ndarray,
    u_stop: np.ndarray,
    gold: np.ndarray,
    class_weights: np.ndarray,
    count: int,
    lr: float,
) -> int:
    """One structured-perceptron update on a single chunk.

    Decodes with current weights (unconstrained); on a mismatch adds the
    gold-path features and subtracts the predicted-path features, each
    position scaled by the class weight of its gold tag. ``count`` is the
    number of instances processed before this one; the u_* accumulators
    collect count-scaled deltas so the trainer can recover averaged
    weights as w - u / total. Returns the number of mislabeled tokens.
    """
    emis = emissions(indptr, indices, weights)
    K = weights.shape[1]
    all_true_start = np.ones(K, dtype=np.bool_)
    all_true_trans = np.ones((K, K), dtype=np.bool_)
    path, _ = viterbi_path(emis, trans, start, stop, all_true_start, all_true_trans)
    if np.array_equal(path, gold):
        return 0
    n = gold.shape[0]
    mislabeled = 0
    for t in range(n):
        g_tag, p_tag = gold[t], path[t]
        if g_tag != p_tag:
            mislabeled += 1
            step = lr * class_weights[g_tag]
            for a in range(indptr[t], indptr[t + 1]):
                f = indices[a]
                weights[f, g_tag] += step
                weights[f, p_tag] -= step
                u_weights[f, g_tag] += count * step
                u_weights[f, p_tag] -= count * step
    step0 = lr * class_weights[gold[0]]
    if gold[0] != path[0]:
        start[gold[0]] += step0
        start[path[0]] -= step0
        u_start[gold[0]] += count * step0
        u_start[path[0]] -= count * step0
    for t in range(1, n):
        if gold[t - 1] != path[t - 1] or gold[t] != path[t]:
            step = lr * class_weights[gold[t]]
            trans[gold[t - 1], gold[t]] += step
            trans[path[t - 1], path[t]] -= step
            u_trans[gold[t - 1], gold[t]] += count * step
            u_trans[path[t - 1], path[t]] -= count * step
    stepn = lr * class_weights[gold[n - 1]]
    if gold[n - 1] != path[n - 1]:
        stop[gold[n - 1]] += stepn
        stop[path[n - 1]] -= stepn
        u_stop[gold[n - 1]] += count * stepn
        u_stop[path[n - 1]] -= count * stepn
    return mislabeled
