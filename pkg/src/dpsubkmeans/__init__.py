"""Differentially private k-means with convergent-zone sampling (baseline and sub-cluster variants)."""

from ._kernels import USING_NUMBA
from .core import Dataset, assign, init_centroids, lloyd, normalize, recenter, wcss_cost
from .dp_kmeans import Strategy, audit_invariant, run_dp_kmeans
from .mechanisms import PrivacyBudget, split_total
from .metrics import cost_gap

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "PrivacyBudget",
    "Strategy",
    "USING_NUMBA",
    "assign",
    "audit_invariant",
    "cost_gap",
    "init_centroids",
    "lloyd",
    "normalize",
    "recenter",
    "run_dp_kmeans",
    "split_total",
    "wcss_cost",
]
