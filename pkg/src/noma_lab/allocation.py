"""Glue between a user partition and its power allocation.

:class:`LinkAllocator` holds one channel realization and turns a candidate
partition into representatives, ZF beams, SIC order and the minimum-power
solution. All clustering algorithms go through it.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels, power
from .beamforming import RCOND, RankDeficientError, select_representatives


@dataclass(frozen=True)
class ClusterAssignment:
    """Partition of ``n_users`` into ordered clusters plus the unserved set.

    Cluster order inside each tuple is the SIC decoding order.
    """

    clusters: tuple
    unserved: tuple
    n_users: int

    def __post_init__(self):
        seen = [u for members in self.clusters for u in members]
        if len(seen) != len(set(seen)):
            raise ValueError("clusters overlap")
        if set(seen) & set(self.unserved):
            raise ValueError("a user is both clustered and unserved")
        if len(seen) + len(self.unserved) != self.n_users:
            raise ValueError("clusters and unserved set do not cover all users")

    @classmethod
    def from_clusters(cls, clusters, n_users):
        clusters = tuple(tuple(int(u) for u in m) for m in clusters if len(m))
        placed = {u for m in clusters for u in m}
        unserved = tuple(u for u in range(n_users) if u not in placed)
        return cls(clusters=clusters, unserved=unserved, n_users=n_users)

    @property
    def n_served(self):
        return self.n_users - len(self.unserved)

    @property
    def n_clusters(self):
        return len(self.clusters)

    def labels(self):
        """Cluster index per user, -1 for unserved."""
        out = np.full(self.n_users, -1, dtype=int)
        for k, members in enumerate(self.clusters):
            out[list(members)] = k
        return out


@dataclass(frozen=True)
class Allocation:
    assignment: ClusterAssignment
    solution: power.PowerSolution
    model: power.SinrModel | None
    representatives: tuple

    @property
    def feasible(self):
        return power.test_P(self.solution, self.solution.p_max)


class LinkAllocator:
    """Evaluate candidate partitions on a fixed channel realization."""

    def __init__(self, H, C, gamma_th, noise_power, p_max):
        self.H = np.ascontiguousarray(H, dtype=np.complex128)
        self.C = np.ascontiguousarray(C, dtype=float)
        self.gamma_th = np.asarray(gamma_th, dtype=float)
        self.noise_power = float(noise_power)
        self.p_max = float(p_max)
        self.n_users = H.shape[0]
        self.n_evaluations = 0
        self.channel_norm2 = np.sum(np.abs(H) ** 2, axis=1)

    def _weakest_first(self, users, strength):
        """Indices into ``users`` ordered weakest ``c * g`` first.

        Zero-forcing gives every representative the same gain, so strengths
        are compared in log space to 9 decimals and ties fall to the weaker
        raw channel, then the higher user index.
        """
        return _kernels.weakest_first(
            np.asarray(users, dtype=np.int64), np.asarray(strength, dtype=float), self.channel_norm2
        )

    def _infeasible(self, assignment, reps=()):
        n = self.n_users
        sol = power.PowerSolution(
            powers=np.zeros(n),
            cluster_totals=np.full(assignment.n_clusters, np.inf),
            total=np.inf,
            p_min_total=np.inf,
            system_ok=False,
            p_max=self.p_max,
            achieved_sinr=np.zeros(n),
        )
        return Allocation(assignment, sol, None, tuple(reps))

    def _link(self, clusters):
        """Flat SIC-ordered link arrays for non-empty ``clusters``.

        Returns ``(users, starts, reps, c, g)`` where ``users`` is grouped by
        cluster (strongest ``c * g`` first inside each group) and ``starts``
        holds each group's offset. Raises :class:`RankDeficientError`.
        """
        sizes = np.fromiter((len(m) for m in clusters), dtype=int, count=len(clusters))
        users = np.fromiter((u for m in clusters for u in m), dtype=int, count=int(sizes.sum()))
        return self._link_flat(users, sizes)

    def _link_flat(self, users, sizes):
        """:meth:`_link` for users already grouped by cluster."""
        ok, users, starts, reps, c, g = _kernels.link_flat(
            self.H, self.C, users.astype(np.int64), sizes.astype(np.int64), RCOND
        )
        if not ok:
            raise RankDeficientError("representative channels are rank deficient")
        return users, starts, tuple(int(r) for r in reps), c, g

    def p_min(self, clusters):
        """Minimum total power of ``clusters`` (inf when the system does not close)."""
        clusters = [list(m) for m in clusters if len(m)]
        if not clusters:
            return 0.0
        self.n_evaluations += 1
        try:
            users, starts, _, c, g = self._link(clusters)
        except RankDeficientError:
            return np.inf
        return self._closed_form(users, starts, c, g)

    def _closed_form(self, users, starts, c, g):
        return _kernels.closed_form(self.gamma_th[users], starts, c, g, self.noise_power)

    def link_model(self, clusters):
        """Representatives, SIC-ordered clusters and the :class:`SinrModel`.

        Raises :class:`RankDeficientError` for co-linear representatives.
        """
        clusters = [list(m) for m in clusters if len(m)]
        users, starts, reps, c_flat, g_flat = self._link(clusters)
        c = np.zeros(self.n_users)
        g = np.zeros(self.n_users)
        c[users] = c_flat
        g[users] = g_flat
        bounds = list(starts[1:]) + [users.size]
        ordered = tuple(
            tuple(int(u) for u in users[a:b]) for a, b in zip(starts, bounds)
        )
        model = power.SinrModel(gamma_th=self.gamma_th, sigma2=self.noise_power, c=c, g=g)
        return ordered, reps, model

    def evaluate(self, clusters, control=False):
        """Minimum-power allocation for ``clusters`` (any member order)."""
        self.n_evaluations += 1
        clusters = [list(m) for m in clusters if len(m)]
        if not clusters:
            assignment = ClusterAssignment.from_clusters((), self.n_users)
            sol = power.PowerSolution(
                powers=np.zeros(self.n_users),
                cluster_totals=np.zeros(0),
                total=0.0,
                p_min_total=0.0,
                system_ok=True,
                p_max=self.p_max,
                achieved_sinr=np.zeros(self.n_users),
            )
            return Allocation(assignment, sol, None, ())
        try:
            ordered, reps, model = self.link_model(clusters)
        except RankDeficientError:
            return self._infeasible(ClusterAssignment.from_clusters(clusters, self.n_users))
        assignment = ClusterAssignment.from_clusters(ordered, self.n_users)
        members = [u for m in ordered for u in m]
        if np.any(model.c[members] * model.g[members] <= 0):
            return self._infeasible(assignment, reps)
        if control:
            try:
                sol = power.run_power_control(ordered, model, self.p_max)
            except power.InfeasibleSystemError:
                return self._infeasible(assignment, reps)
        else:
            sol = power.solve(ordered, model, self.p_max, method="recursive")
        return Allocation(assignment, sol, model, reps)

    def feasible(self, clusters):
        return self.p_min(clusters) <= self.p_max

    def prune(self, clusters, fast=True):
        """Drop weakest users (lowest ``c * g``) until the partition is feasible.

        Representatives and beams are recomputed after every round. Without
        ``fast`` a round evicts one user. With ``fast`` a round evicts the
        weakest quarter (see :func:`noma_lab._kernels.prune_fast`); the round
        that reaches feasibility bisects inside its quarter for the smallest
        eviction that fits. That costs about ``log(N)`` links per prune while
        tracking representative changes almost as closely as single
        evictions. Partitions with linearly dependent representatives lose
        whole clusters first.
        """
        return self.evaluate(self.prune_clusters(clusters, fast)[0])

    def prune_clusters(self, clusters, fast=True):
        """:meth:`prune` without the final allocation: ``(clusters, p_min)``."""
        clusters = [list(m) for m in clusters if len(m)]
        if fast:
            return self._prune_fast(clusters)
        link = self._try_link(clusters)
        while clusters:
            self.n_evaluations += 1
            if link is not None:
                cost = self._closed_form(*link[:2], *link[3:])
                if cost <= self.p_max:
                    return clusters, cost
            clusters = self._evict_weakest(clusters, link)
            link = self._try_link(clusters)
        return [], 0.0

    def _prune_fast(self, clusters):
        while clusters:
            sizes = np.array([len(m) for m in clusters], dtype=np.int64)
            users = np.array([u for m in clusters for u in m], dtype=np.int64)
            status, users, sizes, cost, probes = _kernels.prune_fast(
                self.H, self.C, self.channel_norm2, self.gamma_th, self.noise_power,
                self.p_max, users, sizes, RCOND,
            )
            self.n_evaluations += int(probes)
            clusters = [m.tolist() for m in np.split(users, np.cumsum(sizes)[:-1])] if users.size else []
            if status == 0:
                return clusters, float(cost)
            clusters = self._drop_dependent(clusters)
        return [], 0.0

    def _try_link(self, clusters):
        if not clusters:
            return None
        try:
            return self._link(clusters)
        except RankDeficientError:
            return None

    def _drop_dependent(self, clusters):
        """Drop whole clusters whose representative no beam can separate.

        Clusters are kept largest first (ties by position); a cluster is
        dropped when its representative is linearly dependent on those kept.
        """
        reps = select_representatives(clusters, self.C)
        order = sorted(range(len(clusters)), key=lambda i: (-len(clusters[i]), i))
        kept = []
        for i in order:
            rows = self.H[[reps[j] for j in kept + [i]]]
            s = np.linalg.svd(rows, compute_uv=False)
            if rows.shape[0] <= rows.shape[1] and s[-1] >= RCOND * s[0]:
                kept.append(i)
        return [clusters[i] for i in sorted(kept)]

    def _evict_weakest(self, clusters, link):
        if link is None:
            return self._drop_dependent(clusters)
        else:
            # representatives are not protected: a cluster whose beam is
            # crippled by a near-collinear neighbour empties out this way
            users, _, _, c, g = link
            pick = self._weakest_first(users, c * g)[0]
            victim = int(users[pick])
        out = [[u for u in m if u != victim] for m in clusters]
        return [m for m in out if m]
