"""Numba-compiled twins of the NumPy kernels.

Same signatures, same semantics as ``numpy_backend``; see that module
for the contracts. Compiled objects are cached on disk, so only the
first call after a code change pays the JIT cost.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NEG_INF = -np.inf


@njit(cache=True)
def emissions(indptr, indices, weights):
    n = indptr.shape[0] - 1
    K = weights.shape[1]
    out = np.zeros((n, K))
    for t in range(n):
        for a in range(indptr[t], indptr[t + 1]):
            f = indices[a]
            for k in range(K):
                out[t, k] += weights[f, k]
    return out


@njit(cache=True)
def viterbi_path(emis, trans, start, stop, allowed_start, allowed_trans):
    n, K = emis.shape
    delta = np.empty(K)
    for j in range(K):
        delta[j] = start[j] + emis[0, j] if allowed_start[j] else NEG_INF
    bp = np.zeros((n, K), dtype=np.int64)
    new_delta = np.empty(K)
    for t in range(1, n):
        for j in range(K):
            best = NEG_INF
            arg = 0
            for i in range(K):
                if allowed_trans[i, j]:
                    sc = delta[i] + trans[i, j]
                    if sc > best:  # strict: first max = lowest index
                        best = sc
                        arg = i
            bp[t, j] = arg
            new_delta[j] = best + emis[t, j]
        for j in range(K):
            delta[j] = new_delta[j]
    best = NEG_INF
    last = 0
    for j in range(K):
        sc = delta[j] + stop[j]
        if sc > best:
            best = sc
            last = j
    path = np.zeros(n, dtype=np.int64)
    path[n - 1] = last
    for t in range(n - 1, 0, -1):
        path[t - 1] = bp[t, path[t]]
    return path, best


@njit(cache=True)
def forward_logz(emis, trans, start, stop):
    n, K = emis.shape
    alpha = np.empty(K)
    for j in range(K):
        alpha[j] = start[j] + emis[0, j]
    new_alpha = np.empty(K)
    for t in range(1, n):
        for j in range(K):
            m = NEG_INF
            for i in range(K):
                sc = alpha[i] + trans[i, j]
                if sc > m:
                    m = sc
            s = 0.0
            for i in range(K):
                s += np.exp(alpha[i] + trans[i, j] - m)
            new_alpha[j] = m + np.log(s) + emis[t, j]
        for j in range(K):
            alpha[j] = new_alpha[j]
    m = NEG_INF
    for j in range(K):
        sc = alpha[j] + stop[j]
        if sc > m:
            m = sc
    s = 0.0
    for j in range(K):
        s += np.exp(alpha[j] + stop[j] - m)
    return m + np.log(s)


@njit(cache=True)
def crf_chunk_grad(
    indptr,
    indices,
    weights,
    trans,
    start,
    stop,
    gold,
    class_weights,
    d_weights,
    d_trans,
    d_start,
    d_stop,
):
    emis = emissions(indptr, indices, weights)
    n, K = emis.shape

    beta = np.empty((n, K))
    for j in range(K):
        beta[n - 1, j] = stop[j]
    for t in range(n - 2, -1, -1):
        for j in range(K):
            m = NEG_INF
            for k in range(K):
                sc = trans[j, k] + emis[t + 1, k] + beta[t + 1, k]
                if sc > m:
                    m = sc
            s = 0.0
            for k in range(K):
                s += np.exp(trans[j, k] + emis[t + 1, k] + beta[t + 1, k] - m)
            beta[t, j] = m + np.log(s)

    m0 = NEG_INF
    for j in range(K):
        sc = start[j] + emis[0, j] + beta[0, j]
        if sc > m0:
            m0 = sc
    s0 = 0.0
    for j in range(K):
        s0 += np.exp(start[j] + emis[0, j] + beta[0, j] - m0)
    logz = m0 + np.log(s0)

    g0 = gold[0]
    w0 = class_weights[g0]
    loss = -w0 * (start[g0] + emis[0, g0] + beta[0, g0] - logz)
    for t in range(1, n):
        a, b = gold[t - 1], gold[t]
        loss -= class_weights[b] * (
            trans[a, b] + emis[t, b] + beta[t, b] - beta[t - 1, a]
        )

    d_emis = np.zeros((n, K))
    g = np.zeros((n, K))
    for j in range(K):
        p0j = np.exp(start[j] + emis[0, j] + beta[0, j] - logz)
        d_start[j] += w0 * p0j
        d_emis[0, j] += w0 * p0j
        g[0, j] += w0 * p0j
    d_start[g0] -= w0
    d_emis[0, g0] -= w0
    g[0, g0] -= w0
    for t in range(1, n):
        a, b = gold[t - 1], gold[t]
        wt = class_weights[b]
        d_trans[a, b] -= wt
        d_emis[t, b] -= wt
        g[t, b] -= wt
        g[t - 1, a] += wt

    for t in range(n - 1):
        for j in range(K):
            gj = g[t, j]
            for k in range(K):
                q = np.exp(trans[j, k] + emis[t + 1, k] + beta[t + 1, k] - beta[t, j])
                gq = gj * q
                d_trans[j, k] += gq
                d_emis[t + 1, k] += gq
                g[t + 1, k] += gq
    for j in range(K):
        d_stop[j] += g[n - 1, j]

    for t in range(n):
        for a in range(indptr[t], indptr[t + 1]):
            f = indices[a]
            for k in range(K):
                d_weights[f, k] += d_emis[t, k]
    return loss


@njit(cache=True)
def perceptron_step(
    indptr,
    indices,
    weights,
    trans,
    start,
    stop,
    u_weights,
    u_trans,
    u_start,
    u_stop,
    gold,
    class_weights,
    count,
    lr,
):
    emis = emissions(indptr, indices, weights)
    K = weights.shape[1]
    all_true_start = np.ones(K, dtype=np.bool_)
    all_true_trans = np.ones((K, K), dtype=np.bool_)
    path, _ = viterbi_path(emis, trans, start, stop, all_true_start, all_true_trans)
    n = gold.shape[0]
    same = True
    for t in range(n):
        if path[t] != gold[t]:
            same = False
            break
    if same:
        return 0
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
