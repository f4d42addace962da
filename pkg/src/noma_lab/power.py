"""SINR-constrained power allocation for clustered NOMA downlink.

Clusters are ordered user lists; list order is the SIC decoding order, index 0
decodes first and sees no intra-cluster interference. A user's minimum power
satisfies its threshold with equality::

    p_n = gamma_n * sigma2 / (c_n g_n) + gamma_n * sum_{j<n} p_j
          + gamma_n * (1 - c_n) / c_n * X_k

with ``X_k`` the total power of every other cluster. The recursion is linear
in ``X_k``, so each cluster total obeys ``A_k = alpha_k + beta_k * X_k`` and
the whole system closes to::

    P_min = sum_k alpha_k / (1 + beta_k) / (1 - sum_k beta_k / (1 + beta_k))
"""

from dataclasses import dataclass, field

import numpy as np


class InfeasibleSystemError(ArithmeticError):
    """Inter-cluster coupling is too strong for any finite power."""


@dataclass(frozen=True)
class SinrModel:
    """Per-user link quantities, indexed by user id.

    ``c`` is the collinearity to the cluster representative, ``g`` the
    effective channel-beam gain. Unclustered users may hold any value.
    """

    gamma_th: np.ndarray
    sigma2: float
    c: np.ndarray
    g: np.ndarray

    def noise_term(self, users):
        users = np.asarray(users, dtype=int)
        with np.errstate(divide="ignore"):
            return self.sigma2 / (self.c[users] * self.g[users])

    def leakage_term(self, users):
        users = np.asarray(users, dtype=int)
        c = self.c[users]
        with np.errstate(divide="ignore"):
            return (1.0 - c) / c


@dataclass(frozen=True)
class ClusterPowerCoefficients:
    alpha: np.ndarray
    beta: np.ndarray

    @property
    def denominator(self):
        return 1.0 - float(np.sum(self.beta / (1.0 + self.beta)))


@dataclass(frozen=True)
class PowerSolution:
    powers: np.ndarray
    cluster_totals: np.ndarray
    total: float
    p_min_total: float
    system_ok: bool
    p_max: float
    achieved_sinr: np.ndarray
    budgets: np.ndarray | None = field(default=None)

    @property
    def feasible(self):
        return test_P(self, self.p_max)

    @property
    def served(self):
        return np.flatnonzero(self.powers > 0)


def _cluster_arrays(clusters):
    return [np.asarray(members, dtype=int) for members in clusters if len(members)]


def sinr_all(powers, clusters, model):
    """SINR of every clustered user under ``powers`` (0 for the rest)."""
    powers = np.asarray(powers, dtype=float)
    out = np.zeros_like(powers)
    clusters = _cluster_arrays(clusters)
    total = sum(float(powers[m].sum()) for m in clusters)
    for members in clusters:
        p = powers[members]
        intra = np.cumsum(p) - p
        inter = total - p.sum()
        c, g = model.c[members], model.g[members]
        out[members] = c * p * g / (model.sigma2 + c * g * intra + (1 - c) * g * inter)
    return out


def sinr(u, powers, clusters, model):
    """SINR of user ``u``; see :func:`sinr_all`."""
    for members in clusters:
        members = list(members)
        if u in members:
            break
    else:
        raise ValueError(f"user {u} is not in any cluster")
    powers = np.asarray(powers, dtype=float)
    pos = members.index(u)
    intra = float(powers[members[:pos]].sum())
    own = float(powers[members].sum())
    total = sum(float(powers[list(m)].sum()) for m in clusters)
    inter = total - own
    c, g = model.c[u], model.g[u]
    return c * powers[u] * g / (model.sigma2 + c * g * intra + (1 - c) * g * inter)


def calcul_P(clusters, model, inter_power):
    """Threshold-tight powers given each cluster's out-of-cluster power.

    Evaluates the decoding-order recursion user by user.
    """
    powers = np.zeros(len(model.gamma_th))
    for members, X in zip(_cluster_arrays(clusters), inter_power):
        running = 0.0
        noise = model.noise_term(members)
        leak = model.leakage_term(members)
        for u, x, y in zip(members, noise, leak):
            gam = model.gamma_th[u]
            p = gam * x + gam * running + gam * y * X
            powers[u] = p
            running += p
    return powers


def _recursive_terms(gamma, x, y):
    """Per-user noise and leakage coefficients (a_n, b_n) of one cluster.

    ``S_n = (1 + gamma_n) S_{n-1} + gamma_n x_n`` solved with cumulative
    products; returns the per-user increments.
    """
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        Q = np.cumprod(1.0 + gamma)
        S = Q * np.cumsum(gamma * x / Q)
        T = Q * np.cumsum(gamma * y / Q)
    a = np.diff(S, prepend=0.0)
    b = np.diff(T, prepend=0.0)
    return a, b


def cluster_terms(clusters, model):
    """``(a, b)`` per cluster so that ``p_n = a_n + b_n * X_k``."""
    out = []
    for members in _cluster_arrays(clusters):
        out.append(
            _recursive_terms(
                model.gamma_th[members], model.noise_term(members), model.leakage_term(members)
            )
        )
    return out


def _constant_threshold_coefficients(members, model):
    """Closed-form alpha/beta for a shared threshold (explicit double sums)."""
    gam = float(model.gamma_th[members[0]])
    x = model.noise_term(members)
    y = model.leakage_term(members)
    n = len(members)
    alpha = gam * x.sum()
    beta = gam * y.sum()
    for i in range(n):
        for j in range(i):
            w = (1.0 + gam) ** (i - j - 1)
            alpha += gam**2 * w * x[j]
            beta += gam**2 * w * y[j]
    return alpha, beta


def coefficients(clusters, model, method="auto"):
    """Cluster coefficients of the linear system ``A_k >= alpha_k + beta_k X_k``.

    ``method="constant"`` uses the explicit double sums (shared threshold per
    cluster), ``"recursive"`` the exact recursion valid for per-user
    thresholds. ``"auto"`` picks constant when every threshold is equal.
    """
    groups = _cluster_arrays(clusters)
    if method == "auto":
        used = np.concatenate(groups) if groups else np.empty(0, dtype=int)
        same = used.size == 0 or np.all(model.gamma_th[used] == model.gamma_th[used[0]])
        method = "constant" if same else "recursive"
    alpha, beta = np.zeros(len(groups)), np.zeros(len(groups))
    if method == "constant":
        for k, members in enumerate(groups):
            if np.any(model.gamma_th[members] != model.gamma_th[members[0]]):
                raise ValueError("constant-threshold path needs equal thresholds per cluster")
            alpha[k], beta[k] = _constant_threshold_coefficients(members, model)
    elif method == "recursive":
        for k, (a, b) in enumerate(cluster_terms(groups, model)):
            alpha[k], beta[k] = a.sum(), b.sum()
    else:
        raise ValueError(f"unknown method {method!r}")
    return ClusterPowerCoefficients(alpha=alpha, beta=beta)


def p_min_closed_form(clusters, model, method="auto"):
    """Minimum total power, coefficients and per-cluster totals.

    Raises :class:`InfeasibleSystemError` when ``1 - sum beta/(1+beta) <= 0``.
    """
    coef = coefficients(clusters, model, method)
    denom = coef.denominator
    if not np.isfinite(denom) or denom <= 0 or not np.all(np.isfinite(coef.alpha)):
        raise InfeasibleSystemError(f"closed-form denominator {denom:.3g} is not positive")
    p_min = float(np.sum(coef.alpha / (1.0 + coef.beta))) / denom
    A = (coef.alpha + coef.beta * p_min) / (1.0 + coef.beta)
    return p_min, coef, A


def test_P(solution, p_max):
    """True when the system closed and the total fits the budget."""
    return bool(solution.system_ok and solution.total <= p_max)


test_P.__test__ = False  # not a pytest test


def power_control_step(p_max_vec, p_min_vec):
    """One feedback update of the per-cluster budgets.

    Each budget becomes its own minimum plus the average slack of the others,
    which keeps the budget sum unchanged. With a single budget the update is
    undefined and the input is returned.
    """
    p_max_vec = np.asarray(p_max_vec, dtype=float)
    p_min_vec = np.asarray(p_min_vec, dtype=float)
    M = p_max_vec.size
    if M < 2:
        return p_max_vec.copy()
    delta = p_max_vec - p_min_vec
    spare = p_max_vec.sum() - p_min_vec.sum()
    return (spare - delta) / (M - 1) + p_min_vec


def _polish(powers, groups, model):
    """Re-derive threshold-tight powers so no SINR falls short by rounding.

    Deep clusters amplify rounding in the closed form. The recursion is
    evaluated against the inter-cluster power of a slightly lifted copy;
    when the result stays below that copy it interferes less than assumed,
    so every user meets its threshold. Returns ``powers`` unchanged when no
    lift up to 1e-5 works.
    """
    for lift in (1e-10, 1e-8, 1e-7, 1e-6, 1e-5):
        lifted = powers * (1.0 + lift)
        totals = np.array([lifted[m].sum() for m in groups])
        tight = calcul_P(groups, model, totals.sum() - totals)
        if np.all(tight <= lifted):
            return tight
    return powers


def solve(clusters, model, p_max, method="auto"):
    """Minimum-power :class:`PowerSolution` for ordered ``clusters``."""
    n = len(model.gamma_th)
    groups = _cluster_arrays(clusters)
    try:
        p_min, _, A = p_min_closed_form(groups, model, method)
    except InfeasibleSystemError:
        return PowerSolution(
            powers=np.zeros(n),
            cluster_totals=np.full(len(groups), np.inf),
            total=np.inf,
            p_min_total=np.inf,
            system_ok=False,
            p_max=p_max,
            achieved_sinr=np.zeros(n),
        )
    powers = np.zeros(n)
    for members, (a, b), A_k in zip(groups, cluster_terms(groups, model), A):
        powers[members] = a + b * (p_min - A_k)
    ok = bool(np.all(np.isfinite(powers)) and np.isfinite(p_min))
    if ok:
        powers = _polish(powers, groups, model)
        A = np.array([powers[m].sum() for m in groups])
    return PowerSolution(
        powers=powers,
        cluster_totals=A,
        total=float(A.sum()) if ok else p_min,
        p_min_total=p_min,
        system_ok=ok,
        p_max=p_max,
        achieved_sinr=sinr_all(powers, groups, model) if ok else np.zeros(n),
    )


def run_power_control(clusters, model, p_max, max_iters=50, tol=1e-6):
    """Iterate closed-form allocation and budget feedback.

    Budgets start as an even split of ``p_max``. Users transmit their minimum
    powers; the converged budgets are reported on the solution. Raises
    :class:`InfeasibleSystemError` when the system does not close.
    """
    groups = _cluster_arrays(clusters)
    p_min, _, A = p_min_closed_form(groups, model)
    budgets = np.full(len(groups), p_max / max(len(groups), 1))
    for _ in range(max_iters):
        updated = power_control_step(budgets, A)
        change = np.max(np.abs(updated - budgets)) if budgets.size else 0.0
        budgets = updated
        if change < tol:
            break
    base = solve(groups, model, p_max)
    return PowerSolution(
        powers=base.powers,
        cluster_totals=base.cluster_totals,
        total=base.total,
        p_min_total=p_min,
        system_ok=base.system_ok,
        p_max=p_max,
        achieved_sinr=base.achieved_sinr,
        budgets=budgets,
    )
