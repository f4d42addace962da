"""Correlation-based iterative clustering (three greedy phases)."""

from ..correlation import sorted_pairs
from ._base import BaseUserClustering, _run


class CIAClustering(BaseUserClustering):
    """Greedy correlation clustering with merge/expand and final insertion.

    Phase 1 opens one cluster per strongly correlated pair while clusters are
    free; the partner of an already placed user goes to the singleton pool and
    pairs that cannot be placed go to the non-allocated pool. Phase 2 tries,
    for every ordered cluster pair ``(m, n)`` and pooled pair, to merge
    cluster ``n`` into ``m`` and reuse ``n`` for the pooled pair. Phase 3
    tries every remaining user in every cluster. Each tentative change is kept
    only when the allocation stays feasible; otherwise the previous partition
    is restored unchanged.

    ``history_`` records ``(phase, accepted)`` for every attempted mutation.
    """

    def __init__(self, n_clusters=None, gamma_th_db=10.0, noise_power=0.01, p_max=1.0):
        self.n_clusters = n_clusters
        self.gamma_th_db = gamma_th_db
        self.noise_power = noise_power
        self.p_max = p_max

    def _try(self, allocator, clusters, candidate, phase):
        ok = allocator.feasible(candidate)
        self.history_.append((phase, ok))
        return (candidate, True) if ok else (clusters, False)

    def _cluster(self, allocator, n_clusters):
        self.history_ = []
        if allocator.n_users == 1:
            return [[0]] if allocator.feasible([[0]]) else []
        clusters = [[] for _ in range(n_clusters)]
        placed = set()
        singletons, non_alloc, pooled = [], [], set()

        def to_singletons(u):
            if u not in placed and u not in pooled:
                singletons.append(u)
                pooled.add(u)

        # Phase 1: initial groups from the sorted pair list
        for i, j, _ in sorted_pairs(allocator.C):
            i_in, j_in = i in placed, j in placed
            if i_in and j_in:
                continue
            if i_in or j_in:
                to_singletons(j if i_in else i)
                continue
            free = next((m for m, members in enumerate(clusters) if not members), None)
            if free is not None:
                candidate = [list(m) for m in clusters]
                candidate[free] = [i, j]
                clusters, ok = self._try(allocator, clusters, candidate, 1)
                if ok:
                    placed.update((i, j))
                    continue
            if i not in pooled and j not in pooled:
                non_alloc.append((i, j))
                pooled.update((i, j))

        # Phase 2: merge cluster n into m, reuse n for a pooled pair
        for m in range(n_clusters):
            for n in range(n_clusters):
                if m == n:
                    continue
                for el in list(non_alloc):
                    if el not in non_alloc or placed.intersection(el):
                        continue
                    candidate = [list(c) for c in clusters]
                    candidate[m] = candidate[m] + candidate[n]
                    candidate[n] = list(el)
                    clusters, ok = self._try(allocator, clusters, candidate, 2)
                    if ok:
                        non_alloc.remove(el)
                        placed.update(el)

        # Phase 3: insert remaining users one by one
        pool = list(singletons)
        pool += [u for el in non_alloc for u in el]
        pool += [u for u in range(allocator.n_users) if u not in pooled]
        for m in range(n_clusters):
            for u in pool:
                if u in placed:
                    continue
                candidate = [list(c) for c in clusters]
                candidate[m] = candidate[m] + [u]
                clusters, ok = self._try(allocator, clusters, candidate, 3)
                if ok:
                    placed.add(u)
        return clusters


def cia(channels, C=None, **params):
    """Functional form of :class:`CIAClustering`; returns (assignment, solution)."""
    return _run(CIAClustering(**params), channels, C)
