"""Laplace and exponential mechanisms plus sequential-composition budgeting."""

from dataclasses import dataclass

import numpy as np

from . import _kernels

DEFAULT_RHO = 0.5


@dataclass(frozen=True)
class PrivacyBudget:
    """Per-iteration exponential budget, final Laplace budget and iteration count."""

    eps_exp: float
    eps_lap: float
    iterations: int

    def __post_init__(self):
        if not self.eps_exp > 0 or not self.eps_lap > 0:
            raise ValueError(f"budgets must be positive, got eps_exp={self.eps_exp}, eps_lap={self.eps_lap}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")

    def total(self):
        return total_budget(self)


def total_budget(b):
    return b.iterations * b.eps_exp + b.eps_lap


def split_total(eps_total, T, rho=DEFAULT_RHO):
    """Split a total budget: ``rho`` of it spread evenly over T iterations, the rest to Laplace."""
    if not eps_total > 0:
        raise ValueError(f"eps_total must be positive, got {eps_total}")
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    return PrivacyBudget(eps_exp=rho * eps_total / T, eps_lap=(1.0 - rho) * eps_total, iterations=int(T))


def laplace_perturb(vec, scale, rng):
    if not scale > 0:
        raise ValueError(f"Laplace scale must be positive, got {scale}")
    v = np.asarray(vec, dtype=np.float64)
    return v + rng.laplace(0.0, scale, size=v.shape)


@dataclass(frozen=True)
class ScoredCandidateSet:
    candidates: np.ndarray
    scores: np.ndarray
    sensitivity: float

    def __post_init__(self):
        cands = np.atleast_2d(np.asarray(self.candidates, dtype=np.float64))
        scores = np.asarray(self.scores, dtype=np.float64).ravel()
        if cands.shape[0] == 0 or scores.size == 0:
            raise ValueError("candidate set is empty")
        if scores.size != cands.shape[0]:
            raise ValueError(f"{cands.shape[0]} candidates but {scores.size} scores")
        if not np.all(np.isfinite(scores)):
            raise ValueError("scores must be finite")
        if not self.sensitivity > 0:
            raise ValueError(f"sensitivity must be positive, got {self.sensitivity}")
        object.__setattr__(self, "candidates", cands)
        object.__setattr__(self, "scores", scores)


def exp_probabilities(scores, epsilon, sensitivity):
    """Selection law ``exp(eps * q / (2 * dq)) / Z``, shifted by the max score before exp."""
    s = np.asarray(scores, dtype=np.float64)
    with np.errstate(over="ignore"):
        # overflow only drives logits to -inf, i.e. zero weight
        logits = epsilon * (s - s.max()) / (2.0 * sensitivity)
    w = np.exp(logits)
    return w / w.sum()


def exp_mechanism(cset, epsilon, rng):
    """Draw one candidate index from the exponential mechanism."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    p = exp_probabilities(cset.scores, epsilon, cset.sensitivity)
    cdf = np.cumsum(p)
    u = rng.random() * cdf[-1]
    idx = int(np.searchsorted(cdf, u, side="right"))
    return min(idx, len(p) - 1)


def score_q(candidate, lloyd_centroid):
    """Negative Euclidean distance to the Lloyd centroid (0 is the best score)."""
    a = np.asarray(candidate, dtype=np.float64)
    b = np.asarray(lloyd_centroid, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return -_kernels.distance(a, b)


def score_all(candidates, lloyd_centroid):
    """Vectorised :func:`score_q` over the rows of ``candidates``."""
    return -_kernels.distances_to(np.ascontiguousarray(candidates, dtype=np.float64),
                                  np.asarray(lloyd_centroid, dtype=np.float64))


def noisy_mean_sensitivity(d, n):
    """L1 sensitivity of a cluster mean on [0,1]^d: d for the sums plus 1 for the count, over n."""
    return (d + 1.0) / max(int(n), 1)


def laplace_scale(d, n, eps_lap):
    if not eps_lap > 0:
        raise ValueError(f"eps_lap must be positive, got {eps_lap}")
    return noisy_mean_sensitivity(d, n) / eps_lap

