"""Two-users-per-cluster baselines."""

import numpy as np

from ..correlation import sorted_pairs
from ._base import BaseUserClustering, _run


class NearFarPairing(BaseUserClustering):
    """Pair the strongest remaining user with the weakest remaining one.

    Channel strength is ``|h_u|^2``. Each pair opens the next cluster and is
    kept only if the whole allocation stays feasible.
    """

    def __init__(self, n_clusters=None, gamma_th_db=10.0, noise_power=0.01, p_max=1.0):
        self.n_clusters = n_clusters
        self.gamma_th_db = gamma_th_db
        self.noise_power = noise_power
        self.p_max = p_max

    def _cluster(self, allocator, n_clusters):
        strength = np.sum(np.abs(allocator.H) ** 2, axis=1)
        order = sorted(range(allocator.n_users), key=lambda u: (-strength[u], u))
        clusters = []
        lo, hi = 0, len(order) - 1
        while lo <= hi and len(clusters) < n_clusters:
            pair = [order[lo]] if lo == hi else [order[lo], order[hi]]
            lo, hi = lo + 1, hi - 1
            if allocator.feasible(clusters + [pair]):
                clusters.append(pair)
        return clusters


class CorrelationPairing(BaseUserClustering):
    """Greedy pairing down the collinearity-sorted pair list."""

    def __init__(self, n_clusters=None, gamma_th_db=10.0, noise_power=0.01, p_max=1.0):
        self.n_clusters = n_clusters
        self.gamma_th_db = gamma_th_db
        self.noise_power = noise_power
        self.p_max = p_max

    def _cluster(self, allocator, n_clusters):
        clusters, placed = [], set()
        for i, j, _ in sorted_pairs(allocator.C):
            if len(clusters) >= n_clusters:
                break
            if i in placed or j in placed:
                continue
            if allocator.feasible(clusters + [[i, j]]):
                clusters.append([i, j])
                placed.update((i, j))
        if allocator.n_users == 1 and n_clusters >= 1 and allocator.feasible([[0]]):
            clusters = [[0]]
        return clusters


def near_far_pairing(channels, C=None, **params):
    """Functional form of :class:`NearFarPairing`; returns (assignment, solution)."""
    return _run(NearFarPairing(**params), channels, C)


def correlation_pairing(channels, C=None, **params):
    """Functional form of :class:`CorrelationPairing`; returns (assignment, solution)."""
    return _run(CorrelationPairing(**params), channels, C)
