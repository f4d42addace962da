"""Downlink MIMO-NOMA user clustering and SINR-constrained power allocation."""

from .allocation import Allocation, ClusterAssignment, LinkAllocator
from .channel import ChannelParams, ChannelSet, array_response, generate_channels
from .clustering import (
    ALGORITHMS,
    CIAClustering,
    CorrelationPairing,
    GWOClustering,
    KUCClustering,
    NearFarPairing,
    RandomClustering,
)
from .correlation import collinearity, sorted_pairs
from .power import PowerSolution, SinrModel

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "Allocation",
    "CIAClustering",
    "ChannelParams",
    "ChannelSet",
    "ClusterAssignment",
    "CorrelationPairing",
    "GWOClustering",
    "KUCClustering",
    "LinkAllocator",
    "NearFarPairing",
    "PowerSolution",
    "RandomClustering",
    "SinrModel",
    "array_response",
    "collinearity",
    "generate_channels",
    "sorted_pairs",
]
