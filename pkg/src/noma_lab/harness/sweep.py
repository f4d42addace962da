"""Monte-Carlo sweeps: one row per (algorithm, sweep point, trial)."""

import csv
import io
import os
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields

import numpy as np

from ..channel import generate_channels
from ..clustering import ALGORITHMS
from ..metrics import evaluate as metrics_of

MASK64 = (1 << 64) - 1
THREADS_ENV = "NOMA_LAB_THREADS"


def _splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def hash64(*words):
    """Fold integers into one 64-bit value with splitmix64 rounds.

    ``h0 = splitmix64(0)``, then ``h = splitmix64(h ^ (w mod 2**64))`` per word.
    """
    h = _splitmix64(0)
    for w in words:
        h = _splitmix64(h ^ (int(w) & MASK64))
    return h


def sweep_index(n_users, n_clusters):
    """Stable key of a sweep point; independent of the point's list position."""
    return (int(n_users) << 16) | int(n_clusters)


def trial_seed(master_seed, n_users, n_clusters, trial):
    return hash64(master_seed, sweep_index(n_users, n_clusters), trial)


def algorithm_seed(seed, algorithm):
    """Seed for an algorithm's own randomness, derived from the trial seed."""
    return hash64(seed, zlib.crc32(algorithm.encode()))


@dataclass(frozen=True)
class ResultRow:
    algorithm: str
    n_users: int
    n_clusters: int
    trial: int
    served_users: int
    total_power_w: float
    sum_rate_bps: float
    energy_efficiency_bpj: float
    runtime_ms: float
    seed: int


FIELDS = tuple(f.name for f in fields(ResultRow))
METRIC_FIELDS = ("served_users", "total_power_w", "sum_rate_bps", "energy_efficiency_bpj", "runtime_ms")


def make_estimator(config, algorithm, n_clusters, seed):
    params = dict(
        n_clusters=n_clusters,
        gamma_th_db=config.gamma,
        noise_power=config.noise_power_w,
        p_max=config.p_max_w,
    )
    params.update(config.estimator_params(algorithm))
    cls = ALGORITHMS[algorithm]
    if "random_state" in cls().get_params():
        params["random_state"] = algorithm_seed(seed, algorithm)
    return cls(**params)


def channels_for(config, n_users, n_clusters, seed):
    return generate_channels(config.channel_params(n_clusters, seed), n_users)


def run_trial(config, n_users, n_clusters, trial):
    """All configured algorithms on one channel draw.

    Returns ``(rows, runtimes_ms, estimators)``; algorithms share the draw so
    comparisons between them are paired.
    """
    seed = trial_seed(config.seed, n_users, n_clusters, trial)
    channels = channels_for(config, n_users, n_clusters, seed)
    rows, runtimes, fitted = [], [], []
    for algorithm in config.algorithm:
        est = make_estimator(config, algorithm, n_clusters, seed)
        start = time.perf_counter()
        est.fit(channels.H)
        elapsed = (time.perf_counter() - start) * 1e3
        m = metrics_of(est.solution_, config.bandwidth_hz)
        rows.append(
            ResultRow(
                algorithm=algorithm,
                n_users=n_users,
                n_clusters=n_clusters,
                trial=trial,
                served_users=m.served_users,
                total_power_w=m.total_power,
                sum_rate_bps=m.sum_rate,
                energy_efficiency_bpj=m.energy_efficiency,
                runtime_ms=elapsed if config.record_runtime else 0.0,
                seed=seed,
            )
        )
        runtimes.append(elapsed)
        fitted.append(est)
    return rows, runtimes, fitted


def _trial_task(args):
    rows, runtimes, _ = run_trial(*args)
    return rows, runtimes


def worker_count(n_tasks):
    cap = os.environ.get(THREADS_ENV)
    limit = os.cpu_count() or 1
    if cap:
        try:
            limit = max(1, int(cap))
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {cap!r}") from None
    return max(1, min(limit, n_tasks))


@dataclass
class SweepResult:
    config: object
    rows: list
    runtimes_ms: list

    def summary(self):
        return aggregate(self.rows)

    def raw_csv(self):
        return rows_to_csv(self.rows)


def run_sweep(config, progress=None):
    """Run every sweep point and trial; rows come back in (point, trial, algorithm) order."""
    tasks = [
        (config, n, m, t)
        for n, m in config.sweep_points()
        for t in range(config.trials)
    ]
    workers = worker_count(len(tasks))
    results = []
    if workers == 1:
        for i, task in enumerate(tasks):
            results.append(_trial_task(task))
            if progress:
                progress(i + 1, len(tasks))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, res in enumerate(pool.map(_trial_task, tasks)):
                results.append(res)
                if progress:
                    progress(i + 1, len(tasks))
    rows = [r for rs, _ in results for r in rs]
    runtimes = [x for _, xs in results for x in xs]
    return SweepResult(config, rows, runtimes)


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write(header, records):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for rec in records:
        writer.writerow([_fmt(v) for v in rec])
    return buf.getvalue()


def rows_to_csv(rows):
    return _write(FIELDS, (astuple(r) for r in rows))


def read_rows(text):
    kinds = {f.name: f.type for f in fields(ResultRow)}
    conv = {"str": str, "int": int, "float": float, str: str, int: int, float: float}
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        out.append(ResultRow(**{k: conv[kinds[k]](v) for k, v in rec.items()}))
    return out


def mean_se(values):
    """Sample mean and standard error (ddof=1; 0 for a single value)."""
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        return float("nan"), float("nan")
    se = float(x.std(ddof=1) / np.sqrt(x.size)) if x.size > 1 else 0.0
    return float(x.mean()), se


SUMMARY_FIELDS = ("algorithm", "n_users", "n_clusters", "trials") + tuple(
    f"{name}_{stat}" for name in METRIC_FIELDS for stat in ("mean", "se")
)


def aggregate(rows):
    """One dict per (algorithm, n_users, n_clusters), in first-seen order."""
    groups = {}
    for r in rows:
        groups.setdefault((r.algorithm, r.n_users, r.n_clusters), []).append(r)
    out = []
    for (algo, n, m), rs in groups.items():
        rec = {"algorithm": algo, "n_users": n, "n_clusters": m, "trials": len(rs)}
        for name in METRIC_FIELDS:
            rec[f"{name}_mean"], rec[f"{name}_se"] = mean_se([getattr(r, name) for r in rs])
        out.append(rec)
    return out


def summary_to_csv(summary):
    return _write(SUMMARY_FIELDS, ([rec[k] for k in SUMMARY_FIELDS] for rec in summary))


def timing_to_csv(rows, runtimes_ms):
    header = ("algorithm", "n_users", "n_clusters", "trial", "runtime_ms")
    return _write(header, ((r.algorithm, r.n_users, r.n_clusters, r.trial, t) for r, t in zip(rows, runtimes_ms)))


def write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
