"""Closed-form minimum power checked against a plain fixed-point iteration.

The fixed point starts every cluster at zero out-of-cluster power, applies
:func:`~noma_lab.power.calcul_P`, recomputes each cluster's out-of-cluster
power from the result and repeats until the change falls below ``1e-10``
relative. A run that grows past ``DIVERGED`` is reported as infeasible.
"""

from dataclasses import dataclass

import numpy as np

from ..power import InfeasibleSystemError, SinrModel, calcul_P, p_min_closed_form

MAX_CLUSTERS = 3
MAX_USERS = 6
TOLERANCE = 1e-6
FIXED_POINT_TOL = 1e-10
DIVERGED = 1e12


class OracleSizeError(ValueError):
    """Instance larger than the oracle's small-instance bounds."""


@dataclass(frozen=True)
class OracleInstance:
    clusters: tuple
    model: SinrModel

    @property
    def n_clusters(self):
        return len(self.clusters)

    @property
    def n_users(self):
        return sum(len(m) for m in self.clusters)


def check_size(instance):
    if instance.n_clusters > MAX_CLUSTERS or instance.n_users > MAX_USERS:
        raise OracleSizeError(
            f"oracle instances are limited to {MAX_CLUSTERS} clusters and {MAX_USERS} users, "
            f"got {instance.n_clusters} and {instance.n_users}"
        )


def random_instance(rng, representatives_only=False, gamma=None):
    """A random small instance: one representative (c = 1) per cluster."""
    K = int(rng.integers(1, MAX_CLUSTERS + 1))
    n = K if representatives_only else int(rng.integers(K, MAX_USERS + 1))
    sizes = np.ones(K, dtype=int)
    for _ in range(n - K):
        sizes[rng.integers(K)] += 1
    c = np.ones(n) if representatives_only else rng.uniform(0.7, 1.0, n)
    clusters, start = [], 0
    for size in sizes:
        members = list(range(start, start + size))
        c[members[int(rng.integers(size))]] = 1.0
        clusters.append(tuple(members))
        start += size
    g = rng.uniform(0.2, 2.0, n)
    gam = float(10 ** (rng.uniform(0.0, 15.0) / 10)) if gamma is None else gamma
    model = SinrModel(gamma_th=np.full(n, gam), sigma2=0.01, c=c, g=g)
    return OracleInstance(tuple(clusters), model)


def fixed_point_total(instance, tol=FIXED_POINT_TOL, max_iter=200_000):
    """Total power at the fixed point, or ``inf`` if the iteration diverges."""
    check_size(instance)
    X = np.zeros(instance.n_clusters)
    groups = [list(m) for m in instance.clusters]
    total = 0.0
    for _ in range(max_iter):
        p = calcul_P(groups, instance.model, X)
        A = np.array([p[m].sum() for m in groups])
        total = float(A.sum())
        if not np.isfinite(total) or total > DIVERGED:
            return np.inf
        X_new = total - A
        if np.max(np.abs(X_new - X)) <= tol * max(total, 1e-300):
            return total
        X = X_new
    return np.inf


def closed_form_total(instance, method="auto"):
    check_size(instance)
    try:
        return p_min_closed_form([list(m) for m in instance.clusters], instance.model, method)[0]
    except InfeasibleSystemError:
        return np.inf


def relative_deviation(a, b):
    if np.isinf(a) and np.isinf(b):
        return 0.0
    if np.isinf(a) or np.isinf(b):
        return np.inf
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


@dataclass
class OracleReport:
    instances: int
    max_deviation: float
    max_threshold_path_deviation: float
    n_infeasible: int
    worst_instance: int

    @property
    def passed(self):
        return self.max_deviation <= TOLERANCE and self.max_threshold_path_deviation <= 1e-9

    def lines(self):
        return [
            f"instances: {self.instances}",
            f"infeasible (both paths): {self.n_infeasible}",
            f"max relative deviation, closed form vs fixed point: {self.max_deviation:.3e}",
            f"max relative deviation, per-user vs shared threshold path: {self.max_threshold_path_deviation:.3e}",
            f"worst instance: {self.worst_instance}",
            "PASS" if self.passed else "FAIL",
        ]


def run_oracle(instances=1000, seed=0):
    """Compare both power paths on ``instances`` random small instances."""
    if instances < 1:
        raise ValueError("instances must be >= 1")
    rng = np.random.default_rng(seed)
    worst, worst_i, worst_path, infeasible = 0.0, -1, 0.0, 0
    for i in range(instances):
        inst = random_instance(rng)
        closed = closed_form_total(inst, "constant")
        fixed = fixed_point_total(inst)
        dev = relative_deviation(closed, fixed)
        if np.isinf(closed) and np.isinf(fixed):
            infeasible += 1
        if dev > worst:
            worst, worst_i = dev, i
        worst_path = max(worst_path, relative_deviation(closed, closed_form_total(inst, "recursive")))
    return OracleReport(instances, worst, worst_path, infeasible, worst_i)
