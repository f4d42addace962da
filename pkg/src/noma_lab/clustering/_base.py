import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from .._validation import check_channels, check_count, check_positive, check_thresholds
from ..allocation import LinkAllocator
from ..correlation import collinearity


class DegenerateInstanceError(ValueError):
    """The instance is too small for the requested algorithm."""


class BaseUserClustering(ClusterMixin, BaseEstimator):
    """Common ``fit`` for the user-clustering estimators.

    ``X`` is the complex channel matrix, one row per user. After fitting:

    - ``labels_``: cluster per user, -1 for unserved users
    - ``assignment_``: :class:`~noma_lab.allocation.ClusterAssignment`
      with clusters in SIC decoding order
    - ``solution_``: :class:`~noma_lab.power.PowerSolution` after power control
    - ``n_served_``, ``collinearity_``, ``representatives_``
    """

    def _check_params(self, H):
        n_users, n_tx = H.shape
        n_clusters = n_tx if self.n_clusters is None else check_count(self.n_clusters, "n_clusters")
        if n_clusters > n_tx:
            raise ValueError(f"n_clusters={n_clusters} exceeds {n_tx} transmit antennas")
        check_positive(self.noise_power, "noise_power")
        check_positive(self.p_max, "p_max")
        gamma = check_thresholds(self.gamma_th_db, n_users)
        return n_clusters, gamma

    def fit(self, X, y=None, C=None):
        H = check_channels(X)
        n_clusters, gamma = self._check_params(H)
        C = collinearity(H) if C is None else np.asarray(C, dtype=float)
        allocator = LinkAllocator(H, C, gamma, self.noise_power, self.p_max)
        clusters = self._cluster(allocator, n_clusters)
        final = allocator.evaluate(clusters, control=True)
        if not final.feasible:
            # defensive: every algorithm only returns feasible partitions
            final = allocator.prune(clusters)
            final = allocator.evaluate(final.assignment.clusters, control=True)
        self.collinearity_ = C
        self.allocation_ = final
        self.assignment_ = final.assignment
        self.solution_ = final.solution
        self.representatives_ = final.representatives
        self.labels_ = final.assignment.labels()
        self.n_served_ = final.assignment.n_served
        self.n_evaluations_ = allocator.n_evaluations
        return self

    def fit_predict(self, X, y=None, C=None):
        return self.fit(X, C=C).labels_

    def _cluster(self, allocator, n_clusters):
        raise NotImplementedError

    @property
    def result_(self):
        check_is_fitted(self, "assignment_")
        return self.assignment_, self.solution_

    def _more_tags(self):
        return {"X_types": ["2darray"], "non_deterministic": False}


def _run(estimator, channels, C):
    H = getattr(channels, "H", channels)
    return estimator.fit(H, C=C).result_
