"""Clustered mmWave downlink channels (extended Saleh-Valenzuela).

Each user sees ``n_scatter_clusters`` scattering clusters of
``rays_per_cluster`` rays. Users are grouped into hotspots; users in the same
hotspot share the cluster-centre angles, which is what produces the mix of
highly and weakly correlated users the clustering algorithms feed on. Ray
angles are the centre plus Laplacian offsets, ray gains are CN(0, 1).

Users are single-antenna, so the receive response collapses to 1 and each
user's channel is a row vector over the transmit array.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from ._validation import check_count, check_positive

GEOMETRIES = ("uniform-linear", "uniform-planar")
GAIN_MODELS = ("unit-gain", "sectorized")

# sectorized pattern: full gain inside +-60 deg azimuth, -10 dB outside
_SECTOR_HALF_WIDTH = np.pi / 3
_SECTOR_BACKLOBE = 0.1


@dataclass(frozen=True)
class ChannelParams:
    """Generation parameters for :func:`generate_channels`.

    ``carrier_normalization`` defaults to ``sqrt(M / (L * R))`` so that with
    unit-gain antennas E[|h|^2] equals the number of transmit antennas.
    ``path_gain_db`` is a large-scale gain common to every user.
    ``gain_spread_db`` adds a per-user large-scale gain drawn uniformly in
    ``[-gain_spread_db, 0]`` dB (0 disables it).
    """

    n_tx_antennas: int = 5
    n_scatter_clusters: int = 4
    rays_per_cluster: int = 10
    angular_spread: float = float(np.deg2rad(10.0))
    carrier_normalization: float | None = None
    antenna_gain_model: str = "unit-gain"
    array_geometry: str = "uniform-linear"
    element_spacing: float = 0.5
    n_hotspots: int | None = None
    gain_spread_db: float = 0.0
    path_gain_db: float = 0.0
    seed: int = 0

    def __post_init__(self):
        check_count(self.n_tx_antennas, "n_tx_antennas")
        check_count(self.n_scatter_clusters, "n_scatter_clusters")
        check_count(self.rays_per_cluster, "rays_per_cluster")
        check_positive(self.angular_spread, "angular_spread")
        check_positive(self.element_spacing, "element_spacing")
        check_positive(self.gain_spread_db, "gain_spread_db", strict=False)
        if not np.isfinite(self.path_gain_db):
            raise ValueError(f"path_gain_db must be finite, got {self.path_gain_db!r}")
        if self.carrier_normalization is not None:
            check_positive(self.carrier_normalization, "carrier_normalization")
        if self.n_hotspots is not None:
            check_count(self.n_hotspots, "n_hotspots")
        if self.antenna_gain_model not in GAIN_MODELS:
            raise ValueError(f"antenna_gain_model must be one of {GAIN_MODELS}")
        if self.array_geometry not in GEOMETRIES:
            raise ValueError(f"array_geometry must be one of {GEOMETRIES}")
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            raise ValueError(f"seed must be an integer, got {self.seed!r}")

    @property
    def gamma(self):
        if self.carrier_normalization is not None:
            return float(self.carrier_normalization)
        n_paths = self.n_scatter_clusters * self.rays_per_cluster
        return float(np.sqrt(self.n_tx_antennas / n_paths))

    @property
    def hotspots(self):
        return self.n_hotspots if self.n_hotspots is not None else self.n_tx_antennas

    def with_seed(self, seed):
        return replace(self, seed=int(seed))


@dataclass(frozen=True)
class ChannelSet:
    """Immutable per-user channel vectors, ``H[u]`` is user ``u``'s row."""

    H: np.ndarray
    params: ChannelParams
    hotspot: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.H.setflags(write=False)
        self.hotspot.setflags(write=False)

    @property
    def n_users(self):
        return self.H.shape[0]

    @property
    def n_tx_antennas(self):
        return self.H.shape[1]


def _planar_shape(n_elements):
    rows = int(np.floor(np.sqrt(n_elements)))
    while n_elements % rows:
        rows -= 1
    return n_elements // rows, rows


def array_response(geometry, angles, n_elements, spacing=0.5):
    """Unit-norm steering vector(s) for ``angles = (azimuth, elevation)``.

    Azimuth and elevation may be arrays of equal shape; the element axis is
    appended last.
    """
    n_elements = check_count(n_elements, "n_elements")
    az, el = (np.asarray(a, dtype=float) for a in angles)
    az, el = np.broadcast_arrays(az, el)
    if geometry == "uniform-linear":
        n = np.arange(n_elements)
        phase = 2 * np.pi * spacing * n * (np.sin(az) * np.cos(el))[..., None]
    elif geometry == "uniform-planar":
        ny, nz = _planar_shape(n_elements)
        m = np.repeat(np.arange(ny), nz)
        n = np.tile(np.arange(nz), ny)
        phase = 2 * np.pi * spacing * (
            m * (np.sin(az) * np.cos(el))[..., None] + n * np.sin(el)[..., None]
        )
    else:
        raise ValueError(f"unknown array geometry {geometry!r}")
    return np.exp(1j * phase) / np.sqrt(n_elements)


def antenna_gain(model, azimuth):
    """Amplitude gain of the transmit element pattern."""
    azimuth = np.asarray(azimuth, dtype=float)
    if model == "unit-gain":
        return np.ones_like(azimuth)
    if model == "sectorized":
        wrapped = np.angle(np.exp(1j * azimuth))
        inside = np.abs(wrapped) <= _SECTOR_HALF_WIDTH
        return np.where(inside, 1.0, np.sqrt(_SECTOR_BACKLOBE))
    raise ValueError(f"unknown antenna gain model {model!r}")


def generate_channels(params, n_users):
    """Draw ``n_users`` channel vectors; a pure function of ``(params, n_users)``."""
    n_users = check_count(n_users, "n_users")
    rng = np.random.default_rng(params.seed)
    L, R, M = params.n_scatter_clusters, params.rays_per_cluster, params.n_tx_antennas

    centre_az = rng.uniform(-np.pi / 2, np.pi / 2, size=(params.hotspots, L))
    centre_el = rng.uniform(-np.pi / 12, np.pi / 12, size=(params.hotspots, L))
    hotspot = rng.integers(params.hotspots, size=n_users)

    offsets = rng.laplace(scale=params.angular_spread, size=(2, n_users, L, R))
    az = centre_az[hotspot][:, :, None] + offsets[0]
    el = centre_el[hotspot][:, :, None] + offsets[1]
    alpha = (rng.standard_normal((n_users, L, R)) + 1j * rng.standard_normal((n_users, L, R)))
    alpha /= np.sqrt(2)

    steering = array_response(params.array_geometry, (az, el), M, params.element_spacing)
    weight = alpha * antenna_gain(params.antenna_gain_model, az)
    H = params.gamma * np.einsum("ulr,ulrm->um", weight, steering)
    if params.path_gain_db:
        H *= 10.0 ** (params.path_gain_db / 20.0)

    if params.gain_spread_db > 0:
        large_scale_db = rng.uniform(-params.gain_spread_db, 0.0, size=n_users)
        H *= np.sqrt(10.0 ** (large_scale_db / 10.0))[:, None]

    return ChannelSet(H=H, params=params, hotspot=hotspot)
