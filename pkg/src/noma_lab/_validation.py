"""Input validation helpers shared by the estimators and the harness."""

from numbers import Integral, Real

import numpy as np


class ChannelError(ValueError):
    """Raised for malformed or degenerate channel input."""


def check_channels(X, *, min_users=1):
    """Validate a channel matrix and return it as a 2-D complex128 array.

    Rows are users, columns are transmit antennas. sklearn's ``check_array``
    rejects complex input, hence this helper.
    """
    H = np.asarray(X)
    if H.ndim == 1:
        H = H[np.newaxis, :]
    if H.ndim != 2:
        raise ChannelError(f"expected a 2-D channel matrix, got shape {H.shape}")
    if not (np.issubdtype(H.dtype, np.number) or H.dtype == np.bool_):
        raise ChannelError(f"channel matrix must be numeric, got dtype {H.dtype}")
    H = H.astype(np.complex128, copy=False)
    if H.shape[0] < min_users:
        raise ChannelError(f"need at least {min_users} user(s), got {H.shape[0]}")
    if H.shape[1] < 1:
        raise ChannelError("channel vectors must have at least one antenna")
    if not np.all(np.isfinite(H)):
        raise ChannelError("channel matrix contains NaN or inf")
    return H


def check_positive(value, name, *, strict=True):
    if not isinstance(value, Real) or isinstance(value, bool):
        raise ValueError(f"{name} must be a real number, got {value!r}")
    if strict and not value > 0:
        raise ValueError(f"{name} must be > 0, got {value!r}")
    if not strict and value < 0:
        raise ValueError(f"{name} must be >= 0, got {value!r}")
    return float(value)


def check_count(value, name, *, minimum=1):
    if not isinstance(value, Integral) or isinstance(value, bool):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value!r}")
    return int(value)


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def check_thresholds(gamma_th_db, n_users):
    """Per-user linear SINR thresholds from a scalar or per-user dB value."""
    gamma = db_to_linear(gamma_th_db)
    if gamma.ndim == 0:
        gamma = np.full(n_users, float(gamma))
    if gamma.shape != (n_users,):
        raise ValueError(
            f"gamma_th_db must be a scalar or have length {n_users}, got shape {gamma.shape}"
        )
    if not np.all(np.isfinite(gamma)) or np.any(gamma <= 0):
        raise ValueError("SINR thresholds must be finite")
    return gamma
