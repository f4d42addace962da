"""Wall-clock scaling of each algorithm over the configured sweep points."""

import time
from dataclasses import dataclass

import numpy as np

from .sweep import _write, channels_for, make_estimator, trial_seed

MIN_REPS = 5


@dataclass(frozen=True)
class BenchRow:
    algorithm: str
    n_users: int
    n_clusters: int
    reps: int
    median_ms: float
    min_ms: float
    max_ms: float
    total_ms: float


BENCH_FIELDS = ("algorithm", "n_users", "n_clusters", "reps", "median_ms", "min_ms", "max_ms", "total_ms")


def run_bench(config, reps=None):
    """Median fit time over ``reps`` channel draws (at least 5; default ``max(trials, 5)``)."""
    reps = max(config.trials, MIN_REPS) if reps is None else reps
    if reps < MIN_REPS:
        raise ValueError(f"reps must be >= {MIN_REPS}, got {reps}")
    out = []
    for n, m in config.sweep_points():
        draws = []
        for r in range(reps):
            seed = trial_seed(config.seed, n, m, r)
            draws.append((seed, channels_for(config, n, m, seed).H))
        for algorithm in config.algorithm:
            times = []
            for seed, H in draws:
                est = make_estimator(config, algorithm, m, seed)
                start = time.perf_counter()
                est.fit(H)
                times.append((time.perf_counter() - start) * 1e3)
            t = np.asarray(times)
            out.append(BenchRow(algorithm, n, m, reps, float(np.median(t)), float(t.min()), float(t.max()), float(t.sum())))
    return out


def bench_to_csv(rows):
    return _write(BENCH_FIELDS, ([getattr(r, k) for k in BENCH_FIELDS] for r in rows))
