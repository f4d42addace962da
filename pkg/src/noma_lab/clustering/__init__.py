"""User-clustering estimators and their functional forms."""

from ._base import BaseUserClustering, DegenerateInstanceError
from .baseline import RandomClustering, random_clustering
from .cia import CIAClustering, cia
from .gwo import GWOClustering, gwo
from .kuc import KUCClustering, kuc
from .pairing import CorrelationPairing, NearFarPairing, correlation_pairing, near_far_pairing

ALGORITHMS = {
    "near_far": NearFarPairing,
    "corr_pair": CorrelationPairing,
    "random": RandomClustering,
    "cia": CIAClustering,
    "kuc": KUCClustering,
    "gwo": GWOClustering,
}

__all__ = [
    "ALGORITHMS",
    "BaseUserClustering",
    "CIAClustering",
    "CorrelationPairing",
    "DegenerateInstanceError",
    "GWOClustering",
    "KUCClustering",
    "NearFarPairing",
    "RandomClustering",
    "cia",
    "correlation_pairing",
    "gwo",
    "kuc",
    "near_far_pairing",
    "random_clustering",
]
