import numpy as np

from ._base import BaseUserClustering, _run


class RandomClustering(BaseUserClustering):
    """Random cluster per user, with a SIC feasibility check after each insertion.

    Users are visited in shuffled order; an insertion that breaks feasibility
    is undone and the user stays unserved.
    """

    def __init__(
        self, n_clusters=None, gamma_th_db=10.0, noise_power=0.01, p_max=1.0, random_state=None
    ):
        self.n_clusters = n_clusters
        self.gamma_th_db = gamma_th_db
        self.noise_power = noise_power
        self.p_max = p_max
        self.random_state = random_state

    def _cluster(self, allocator, n_clusters):
        rng = np.random.default_rng(self.random_state)
        clusters = [[] for _ in range(n_clusters)]
        for u in rng.permutation(allocator.n_users):
            k = rng.integers(n_clusters)
            clusters[k].append(int(u))
            if not allocator.feasible(clusters):
                clusters[k].pop()
        return clusters


def random_clustering(channels, C=None, seed=None, **params):
    """Functional form of :class:`RandomClustering`; returns (assignment, solution)."""
    return _run(RandomClustering(random_state=seed, **params), channels, C)
