"""Scenario configuration: flat ``key = value`` files plus overrides.

Lists are comma-separated, ``#`` starts a comment. Precedence is
command-line overrides, then the file, then defaults. Algorithm-specific
knobs use a dotted prefix, e.g. ``gwo.pop_size = 30``.

Recognized keys::

    n_users            int or increasing list          (default 150)
    n_rf_chains        int or increasing list          (default 5)
    gamma_th_db        float, or one value per user    (default 10)
    noise_power_w      float > 0                       (default 0.01)
    p_max_w            float > 0                       (default 1)
    bandwidth_hz       float > 0                       (default 200e3)
    algorithm          name or list of names           (default cia)
    trials             int >= 1                        (default 1)
    seed               int                             (default 0)
    record_runtime     bool; runtime_ms in the raw CSV (default false)
    n_scatter_clusters, rays_per_cluster, angular_spread_deg,
    antenna_gain_model, array_geometry, element_spacing, n_hotspots,
    gain_spread_db, path_gain_db
                       channel generation
    <algorithm>.<param> estimator keyword overrides
"""

from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from ..channel import GAIN_MODELS, GEOMETRIES, ChannelParams
from ..clustering import ALGORITHMS


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


ALGORITHM_PARAMS = {
    "gwo": {"pop_size": int, "max_iter": int, "penalty": float, "penalty_power": float},
    "kuc": {"max_iter": int},
}


def _as_bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int_list(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _float_list(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _name_list(text):
    return [v.strip() for v in text.split(",") if v.strip()]


@dataclass(frozen=True)
class ScenarioConfig:
    n_users: tuple = (150,)
    n_rf_chains: tuple = (5,)
    gamma_th_db: tuple = (10.0,)
    noise_power_w: float = 0.01
    p_max_w: float = 1.0
    bandwidth_hz: float = 200e3
    algorithm: tuple = ("cia",)
    trials: int = 1
    seed: int = 0
    record_runtime: bool = False
    n_scatter_clusters: int = 4
    rays_per_cluster: int = 10
    angular_spread_deg: float = 10.0
    antenna_gain_model: str = "unit-gain"
    array_geometry: str = "uniform-linear"
    element_spacing: float = 0.5
    n_hotspots: int | None = None
    gain_spread_db: float = 0.0
    path_gain_db: float = 0.0
    algorithm_params: dict = field(default_factory=dict)

    def __post_init__(self):
        for key in ("n_users", "n_rf_chains"):
            values = getattr(self, key)
            if not values or any(v < 1 for v in values):
                raise ConfigError(key, "values must be positive integers")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ConfigError(key, "sweep list must be strictly increasing")
        if self.p_max_w <= 0:
            raise ConfigError("p_max_w", "must be > 0")
        if self.noise_power_w <= 0:
            raise ConfigError("noise_power_w", "must be > 0")
        if self.bandwidth_hz <= 0:
            raise ConfigError("bandwidth_hz", "must be > 0")
        if self.trials < 1:
            raise ConfigError("trials", "must be >= 1")
        if not self.algorithm:
            raise ConfigError("algorithm", "at least one algorithm is required")
        for name in self.algorithm:
            if name not in ALGORITHMS:
                raise ConfigError("algorithm", f"unknown algorithm {name!r}, expected one of {sorted(ALGORITHMS)}")
        if len(self.gamma_th_db) not in (1,) + tuple(self.n_users):
            raise ConfigError("gamma_th_db", "give one value or one per user")
        if len(self.gamma_th_db) > 1 and len(self.n_users) > 1:
            raise ConfigError("gamma_th_db", "per-user thresholds need a single n_users value")
        if self.antenna_gain_model not in GAIN_MODELS:
            raise ConfigError("antenna_gain_model", f"expected one of {GAIN_MODELS}")
        if self.array_geometry not in GEOMETRIES:
            raise ConfigError("array_geometry", f"expected one of {GEOMETRIES}")
        for key in ("n_scatter_clusters", "rays_per_cluster"):
            if getattr(self, key) < 1:
                raise ConfigError(key, "must be >= 1")
        if self.n_hotspots is not None and self.n_hotspots < 1:
            raise ConfigError("n_hotspots", "must be >= 1")
        for key in ("angular_spread_deg", "element_spacing"):
            if getattr(self, key) <= 0:
                raise ConfigError(key, "must be > 0")
        if self.gain_spread_db < 0:
            raise ConfigError("gain_spread_db", "must be >= 0")
        for dotted, value in self.algorithm_params.items():
            algo, _, name = dotted.partition(".")
            if algo not in ALGORITHM_PARAMS or name not in ALGORITHM_PARAMS[algo]:
                raise ConfigError(dotted, "unknown algorithm parameter")
            if algo == "gwo" and name == "pop_size" and value < 3:
                raise ConfigError(dotted, "must be >= 3")
            if name == "max_iter" and value < 1:
                raise ConfigError(dotted, "must be >= 1")

    @property
    def gamma(self):
        return self.gamma_th_db[0] if len(self.gamma_th_db) == 1 else np.asarray(self.gamma_th_db)

    def channel_params(self, n_tx, seed):
        return ChannelParams(
            n_tx_antennas=n_tx,
            n_scatter_clusters=self.n_scatter_clusters,
            rays_per_cluster=self.rays_per_cluster,
            angular_spread=float(np.deg2rad(self.angular_spread_deg)),
            antenna_gain_model=self.antenna_gain_model,
            array_geometry=self.array_geometry,
            element_spacing=self.element_spacing,
            n_hotspots=self.n_hotspots,
            gain_spread_db=self.gain_spread_db,
            path_gain_db=self.path_gain_db,
            seed=seed,
        )

    def estimator_params(self, algorithm):
        prefix = algorithm + "."
        return {k[len(prefix):]: v for k, v in self.algorithm_params.items() if k.startswith(prefix)}

    def sweep_points(self):
        return [(n, m) for n in self.n_users for m in self.n_rf_chains]

    def to_items(self):
        """``(key, text)`` pairs that :func:`parse_items` maps back to this config."""
        items = []
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "algorithm_params":
                items += [(k, str(v)) for k, v in sorted(value.items())]
            elif isinstance(value, tuple):
                items.append((f.name, ",".join(str(v) for v in value)))
            elif value is None:
                continue
            else:
                items.append((f.name, str(value).lower() if isinstance(value, bool) else str(value)))
        return items


_PARSERS = {
    "n_users": lambda t: tuple(_int_list(t)),
    "n_rf_chains": lambda t: tuple(_int_list(t)),
    "gamma_th_db": lambda t: tuple(_float_list(t)),
    "noise_power_w": float,
    "p_max_w": float,
    "bandwidth_hz": float,
    "algorithm": lambda t: tuple(_name_list(t)),
    "trials": int,
    "seed": int,
    "record_runtime": _as_bool,
    "n_scatter_clusters": int,
    "rays_per_cluster": int,
    "angular_spread_deg": float,
    "antenna_gain_model": str.strip,
    "array_geometry": str.strip,
    "element_spacing": float,
    "n_hotspots": int,
    "gain_spread_db": float,
    "path_gain_db": float,
}


def parse_items(items, base=None):
    """Apply ``(key, text)`` pairs on top of ``base`` (defaults if omitted)."""
    values = {}
    algo_params = dict(base.algorithm_params) if base is not None else {}
    for key, text in items:
        key = key.strip().replace("-", "_")
        text = str(text).strip()
        if "." in key:
            algo, _, name = key.partition(".")
            kind = ALGORITHM_PARAMS.get(algo, {}).get(name)
            if kind is None:
                raise ConfigError(key, "unknown algorithm parameter")
            try:
                algo_params[key] = kind(text)
            except ValueError as exc:
                raise ConfigError(key, str(exc)) from None
            continue
        if key not in _PARSERS:
            raise ConfigError(key, "unknown configuration key")
        try:
            values[key] = _PARSERS[key](text)
        except ValueError as exc:
            raise ConfigError(key, f"cannot parse {text!r} ({exc})") from None
    values["algorithm_params"] = algo_params
    try:
        return replace(base, **values) if base is not None else ScenarioConfig(**values)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError("config", str(exc)) from None


def read_items(path):
    items = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        items.append((key.strip(), value.strip()))
    return items


def load_config(path=None, overrides=(), base=None):
    """Defaults < ``base`` < file at ``path`` < ``overrides``."""
    config = base if base is not None else ScenarioConfig()
    if path is not None:
        try:
            config = parse_items(read_items(path), config)
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc}") from None
    if overrides:
        config = parse_items(overrides, config)
    return config


def dump_config(config):
    return "".join(f"{k} = {v}\n" for k, v in config.to_items())
