"""Pairwise channel collinearity and the sorted pair list."""

import numpy as np

from ._validation import ChannelError, check_channels


def collinearity(H):
    """Normalized inner-product magnitude between every pair of users.

    ``C[i, j] = |h_i^H h_j| / (|h_i| |h_j|)``, computed on the realized
    vectors. Diagonal is exactly 1.
    """
    H = check_channels(getattr(H, "H", H))
    norms = np.linalg.norm(H, axis=1)
    if np.any(norms == 0):
        raise ChannelError(f"degenerate channel for user(s) {np.flatnonzero(norms == 0).tolist()}")
    U = H / norms[:, None]
    C = np.abs(U.conj() @ U.T)
    C = np.clip((C + C.T) / 2, 0.0, 1.0)
    np.fill_diagonal(C, 1.0)
    return C


def sorted_pairs(C):
    """All ``(i, j, C[i, j])`` with ``i < j``, strongest correlation first.

    Ties keep ``(i, j)`` ascending.
    """
    C = np.asarray(C, dtype=float)
    i, j = np.triu_indices(C.shape[0], k=1)
    values = C[i, j]
    # lexsort: last key is primary
    order = np.lexsort((j, i, -values))
    return [(int(i[k]), int(j[k]), float(values[k])) for k in order]
