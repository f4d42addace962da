"""Served users, rates and energy efficiency of an allocation."""

import warnings
from dataclasses import dataclass

import numpy as np

BANDWIDTH_HZ = 200e3


class ZeroPowerWarning(RuntimeWarning):
    """Energy efficiency requested for an allocation that serves nobody."""


@dataclass(frozen=True)
class MetricsRecord:
    served_users: int
    total_power: float
    sum_rate: float
    energy_efficiency: float
    per_user_rate: np.ndarray
    bandwidth: float
    zero_power: bool = False


def rates(solution, bandwidth=BANDWIDTH_HZ):
    """Shannon rate per user on the full band; unserved users get 0."""
    sinr = np.where(solution.powers > 0, solution.achieved_sinr, 0.0)
    return bandwidth * np.log2(1.0 + np.clip(sinr, 0.0, None))


def energy_efficiency(sum_rate, total_power):
    """Bits per joule; 0 (with a :class:`ZeroPowerWarning`) when nothing is transmitted."""
    if total_power <= 0:
        warnings.warn("no power transmitted, reporting EE = 0", ZeroPowerWarning, stacklevel=2)
        return 0.0
    return float(sum_rate) / float(total_power)


def evaluate(solution, bandwidth=BANDWIDTH_HZ):
    per_user = rates(solution, bandwidth)
    served = int(np.count_nonzero(solution.powers > 0))
    total = float(solution.total) if served else 0.0
    sum_rate = float(per_user.sum())
    zero = total <= 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ZeroPowerWarning)
        ee = energy_efficiency(sum_rate, total)
    return MetricsRecord(
        served_users=served,
        total_power=total,
        sum_rate=sum_rate,
        energy_efficiency=ee,
        per_user_rate=per_user,
        bandwidth=bandwidth,
        zero_power=zero,
    )
