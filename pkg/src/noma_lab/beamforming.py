"""Representative selection and normalized zero-forcing precoding."""

from dataclasses import dataclass

import numpy as np

RCOND = 1e-10


class RankDeficientError(np.linalg.LinAlgError):
    """Representative channels are (numerically) linearly dependent."""


class EmptyClusterError(ValueError):
    pass


def pinv(A, rcond=RCOND):
    """Moore-Penrose pseudo-inverse through the SVD.

    Raises :class:`RankDeficientError` when the smallest singular value falls
    below ``rcond`` times the largest.
    """
    A = np.asarray(A)
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[-1] < rcond * s[0]:
        raise RankDeficientError(
            f"representative channels are rank deficient (condition ratio {s[-1] / s[0] if s.size else 0.0:.3g})"
        )
    return (Vh.conj().T / s) @ U.conj().T


@dataclass(frozen=True)
class BeamformerSet:
    W: np.ndarray  # (n_tx, n_clusters), columns are beams, ||W||_F = 1
    representatives: tuple
    scale: float  # Frobenius norm of the un-normalized pseudo-inverse

    def gains(self, H, cluster_of):
        """``|h_u w_k(u)|^2`` for every user; ``cluster_of[u] < 0`` gives 0."""
        cluster_of = np.asarray(cluster_of)
        g = np.zeros(H.shape[0])
        mask = cluster_of >= 0
        proj = np.einsum("um,um->u", H[mask], self.W[:, cluster_of[mask]].T)
        g[mask] = np.abs(proj) ** 2
        return g


def select_representatives(clusters, C):
    """Member with the largest intra-cluster collinearity row-sum, per cluster.

    Ties go to the lowest user index.
    """
    sizes = [len(m) for m in clusters]
    for k, size in enumerate(sizes):
        if size == 0:
            raise EmptyClusterError(f"cluster {k} is empty")
    users = np.fromiter((u for m in clusters for u in m), dtype=int, count=sum(sizes))
    k = np.repeat(np.arange(len(sizes)), sizes)
    first = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    sub = C[np.ix_(users, users)]
    np.fill_diagonal(sub, 0.0)
    block = np.add.reduceat(sub, first, axis=1)
    # summation order differs per row; round so exact ties stay ties
    scores = np.round(block[np.arange(users.size), k], 12)
    order = np.lexsort((users, -scores, k))
    return [int(u) for u in users[order][first]]


def zf_precode(H_rep, representatives=None):
    """Frobenius-normalized pseudo-inverse of the stacked representative rows."""
    H_rep = np.atleast_2d(np.asarray(H_rep, dtype=np.complex128))
    if H_rep.shape[0] > H_rep.shape[1]:
        raise RankDeficientError(
            f"{H_rep.shape[0]} clusters exceed {H_rep.shape[1]} transmit antennas"
        )
    W = pinv(H_rep)
    scale = float(np.linalg.norm(W))
    if representatives is None:
        representatives = tuple(range(H_rep.shape[0]))
    return BeamformerSet(W=W / scale, representatives=tuple(representatives), scale=scale)
