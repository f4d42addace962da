"""Compiled inner loops for candidate-partition evaluation.

Search algorithms link and cost thousands of small partitions per fit; at
that size numpy call overhead dominates. These kernels follow the same rules
as :func:`~noma_lab.beamforming.select_representatives`,
:func:`~noma_lab.beamforming.zf_precode` and the decoding-order recursion in
:mod:`noma_lab.power`, which remain the reference implementations.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def link_flat(H, C, users, sizes, rcond):
    """Representatives, zero-forcing gains and SIC order for grouped users.

    Returns ``(ok, users, starts, reps, c, g)``; ``ok`` is False when the
    representative channels are rank deficient.
    """
    K = sizes.size
    n = users.size
    starts = np.zeros(K, np.int64)
    for k in range(1, K):
        starts[k] = starts[k - 1] + sizes[k - 1]

    reps = np.empty(K, np.int64)
    for k in range(K):
        best = -1.0
        rep = -1
        for i in range(starts[k], starts[k] + sizes[k]):
            total = 0.0
            for j in range(starts[k], starts[k] + sizes[k]):
                if j != i:
                    total += C[users[i], users[j]]
            # summation order differs per row; round so exact ties stay ties
            score = round(total, 12)
            if score > best or (score == best and users[i] < rep):
                best = score
                rep = users[i]
        reps[k] = rep

    out_users = users.copy()
    c = np.zeros(n)
    g = np.zeros(n)
    if K > H.shape[1]:
        return False, out_users, starts, reps, c, g
    H_rep = np.empty((K, H.shape[1]), np.complex128)
    for k in range(K):
        H_rep[k, :] = H[reps[k], :]
    U, s, Vh = np.linalg.svd(H_rep, full_matrices=False)
    if s[K - 1] < rcond * s[0]:
        return False, out_users, starts, reps, c, g
    W = np.ascontiguousarray(Vh.conj().T / s) @ np.ascontiguousarray(U.conj().T)
    W = W / np.sqrt(np.sum(np.abs(W) ** 2))

    strength = np.empty(n)
    for k in range(K):
        for i in range(starts[k], starts[k] + sizes[k]):
            u = users[i]
            proj = 0j
            for m in range(H.shape[1]):
                proj += H[u, m] * W[m, k]
            g[i] = proj.real**2 + proj.imag**2
            c[i] = C[u, reps[k]]
            strength[i] = c[i] * g[i]
        # strongest c * g first, ties to the lower user index (insertion sort)
        for i in range(starts[k] + 1, starts[k] + sizes[k]):
            j = i
            while j > starts[k] and (
                strength[j] > strength[j - 1]
                or (strength[j] == strength[j - 1] and out_users[j] < out_users[j - 1])
            ):
                strength[j], strength[j - 1] = strength[j - 1], strength[j]
                out_users[j], out_users[j - 1] = out_users[j - 1], out_users[j]
                c[j], c[j - 1] = c[j - 1], c[j]
                g[j], g[j - 1] = g[j - 1], g[j]
                j -= 1
    return True, out_users, starts, reps, c, g


@njit(cache=True)
def closed_form(gamma, starts, c, g, sigma2):
    """Minimum total power of a linked partition, ``inf`` when it does not close."""
    n = c.size
    K = starts.size
    numer = 0.0
    ratio = 0.0
    for k in range(K):
        end = starts[k + 1] if k + 1 < K else n
        alpha = 0.0
        beta = 0.0
        for i in range(starts[k], end):
            cg = c[i] * g[i]
            if not cg > 0.0:
                return np.inf
            # p_i = gamma_i (x_i + sum of earlier p) + gamma_i (y_i + earlier leakage) X
            a = gamma[i] * (sigma2 / cg + alpha)
            b = gamma[i] * ((1.0 - c[i]) / c[i] + beta)
            alpha += a
            beta += b
        if not (np.isfinite(alpha) and np.isfinite(beta)):
            return np.inf
        numer += alpha / (1.0 + beta)
        ratio += beta / (1.0 + beta)
    denom = 1.0 - ratio
    if not denom > 0.0:
        return np.inf
    return numer / denom


@njit(cache=True)
def weakest_first(users, strength, norm2):
    """Positions of ``users`` weakest first.

    Strengths are compared in log space to 9 decimals; ties fall to the
    weaker raw channel, then the higher index.
    """
    n = users.size
    level = np.empty(n)
    for i in range(n):
        level[i] = round(np.log(strength[i]), 9) if strength[i] > 0 else -np.inf
    order = np.argsort(-users, kind="mergesort")
    order = order[np.argsort(norm2[users[order]], kind="mergesort")]
    return order[np.argsort(level[order], kind="mergesort")]


@njit(cache=True)
def _kept(users, cluster_id, rank, k, n_groups):
    keep = rank >= k
    members = users[keep]
    counts = np.bincount(cluster_id[keep], minlength=n_groups)
    return members, counts[counts > 0]


@njit(cache=True)
def _probe(H, C, gamma, sigma2, users, sizes, rcond):
    if users.size == 0:
        return True, 0.0
    ok, linked, starts, reps, c, g = link_flat(H, C, users, sizes, rcond)
    if not ok:
        return False, np.inf
    return True, closed_form(gamma[linked], starts, c, g, sigma2)


@njit(cache=True)
def prune_fast(H, C, norm2, gamma, sigma2, p_max, users, sizes, rcond):
    """Chunked weakest-first eviction until the partition fits ``p_max``.

    Each round relinks, then evicts the weakest quarter (or every user whose
    own noise term exceeds the budget, if more); the round that fits bisects
    inside its chunk for the smallest eviction. Returns
    ``(status, users, sizes, cost, probes)``: status 0 is a fitting
    partition, status 1 a rank-deficient one the caller must repair.
    """
    probes = 0
    while users.size > 0:
        probes += 1
        ok, linked, starts, reps, c, g = link_flat(H, C, users, sizes, rcond)
        if not ok:
            return 1, users, sizes, np.inf, probes
        n = linked.size
        cost = closed_form(gamma[linked], starts, c, g, sigma2)
        if cost <= p_max:
            return 0, linked, sizes, cost, probes

        strength = c * g
        order = weakest_first(linked, strength, norm2)
        rank = np.empty(n, np.int64)
        for i in range(n):
            rank[order[i]] = i
        n_groups = starts.size
        cluster_id = np.empty(n, np.int64)
        for k in range(n_groups):
            end = starts[k + 1] if k + 1 < n_groups else n
            cluster_id[starts[k]:end] = k

        hopeless = 0
        for i in range(n):
            if not gamma[linked[i]] * sigma2 / strength[i] <= p_max:
                hopeless += 1
        chunk = max(1, n // 4, hopeless)
        rest, rest_sizes = _kept(linked, cluster_id, rank, chunk, n_groups)
        probes += 1
        rest_ok, rest_cost = _probe(H, C, gamma, sigma2, rest, rest_sizes, rcond)
        if rest_cost > p_max:
            if not rest_ok:
                return 1, rest, rest_sizes, np.inf, probes
            users, sizes = rest, rest_sizes
            continue
        # the full partition is known not to fit
        lo, hi, best = 0, chunk, rest_cost
        while hi - lo > 1:
            mid = (lo + hi) // 2
            members, msizes = _kept(linked, cluster_id, rank, mid, n_groups)
            probes += 1
            mid_cost = _probe(H, C, gamma, sigma2, members, msizes, rcond)[1]
            if mid_cost <= p_max:
                hi, best = mid, mid_cost
            else:
                lo = mid
        members, msizes = _kept(linked, cluster_id, rank, hi, n_groups)
        return 0, members, msizes, best, probes
    return 0, users, sizes, 0.0, probes
