"""Grey wolf optimizer over continuous per-user cluster affinities."""

import numpy as np

from ._base import BaseUserClustering, _run


def gwo_fitness(served, non_allocated, total_power, power_limit, penalty=1.0, penalty_power=10.0):
    """Served users minus the non-allocation and over-budget penalties."""
    return served - non_allocated * penalty - penalty_power * max(0.0, total_power - power_limit)


def control_parameter(iteration, max_iter):
    """``a`` falls linearly from 2 at iteration 0 to 0 at ``max_iter``."""
    return 2.0 * (1.0 - iteration / max_iter)


def decode(position, n_clusters):
    """Cluster label per user: ``floor(x)`` clamped to ``[0, n_clusters - 1]``."""
    return np.clip(np.floor(position).astype(int), 0, n_clusters - 1)


class GWOClustering(BaseUserClustering):
    """Grey wolf search over user-to-cluster assignments.

    Each wolf is a real vector with one affinity per user in
    ``[0, n_clusters)``. A decoded partition is scored after evicting its
    weakest users until feasible; evicted users count as non-allocated.
    Wolves move toward the average of the alpha-, beta- and delta-guided
    positions. ``fitness_curve_`` holds the alpha fitness per iteration.
    """

    def __init__(
        self,
        n_clusters=None,
        gamma_th_db=10.0,
        noise_power=0.01,
        p_max=1.0,
        pop_size=20,
        max_iter=100,
        penalty=1.0,
        penalty_power=10.0,
        random_state=None,
    ):
        self.n_clusters = n_clusters
        self.gamma_th_db = gamma_th_db
        self.noise_power = noise_power
        self.p_max = p_max
        self.pop_size = pop_size
        self.max_iter = max_iter
        self.penalty = penalty
        self.penalty_power = penalty_power
        self.random_state = random_state

    def _evaluate(self, allocator, position, n_clusters, cache):
        labels = decode(position, n_clusters)
        key = labels.tobytes()
        if key not in cache:
            clusters = [np.flatnonzero(labels == m).tolist() for m in range(n_clusters)]
            kept, total = allocator.prune_clusters(clusters)
            served = sum(len(m) for m in kept)
            score = gwo_fitness(
                served,
                allocator.n_users - served,
                total,
                allocator.p_max,
                self.penalty,
                self.penalty_power,
            )
            cache[key] = (score, kept)
        return cache[key]

    def _cluster(self, allocator, n_clusters):
        if self.pop_size < 3:
            raise ValueError(f"pop_size must be >= 3, got {self.pop_size}")
        rng = np.random.default_rng(self.random_state)
        n = allocator.n_users
        upper = np.nextafter(float(n_clusters), 0.0)
        cache = {}

        wolves = rng.uniform(0.0, n_clusters, size=(self.pop_size, n))
        scores = np.array([self._evaluate(allocator, w, n_clusters, cache)[0] for w in wolves])
        order = np.argsort(-scores, kind="stable")[:3]
        leaders = wolves[order].copy()
        leader_scores = scores[order].copy()

        curve = []
        for t in range(self.max_iter):
            a = control_parameter(t, self.max_iter)
            guided = np.zeros_like(wolves)
            for leader in leaders:
                r1 = rng.random(wolves.shape)
                r2 = rng.random(wolves.shape)
                A = 2.0 * a * r1 - a
                Cc = 2.0 * r2
                D = np.abs(Cc * leader - wolves)
                guided += leader - A * D
            wolves = np.clip(guided / 3.0, 0.0, upper)
            scores = np.array([self._evaluate(allocator, w, n_clusters, cache)[0] for w in wolves])

            pool = np.vstack([leaders, wolves])
            pool_scores = np.concatenate([leader_scores, scores])
            order = np.argsort(-pool_scores, kind="stable")[:3]
            leaders = pool[order].copy()
            leader_scores = pool_scores[order].copy()
            curve.append(float(leader_scores[0]))

        self.fitness_curve_ = np.array(curve)
        self.alpha_position_ = leaders[0]
        self.alpha_fitness_ = float(leader_scores[0])
        return list(self._evaluate(allocator, leaders[0], n_clusters, cache)[1])


def gwo(channels, C=None, pop_size=20, max_iter=100, seed=None, **params):
    """Functional form of :class:`GWOClustering`; returns (assignment, solution)."""
    est = GWOClustering(pop_size=pop_size, max_iter=max_iter, random_state=seed, **params)
    return _run(est, channels, C)
