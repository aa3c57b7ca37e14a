"""Cost gap and cross-run aggregation."""

import math
import statistics
from collections import defaultdict
from dataclasses import dataclass
from typing import Optional

# sentinel for a zero denominator in improvement_ratio
INFINITE_IMPROVEMENT = math.inf


@dataclass(frozen=True)
class CostGapRecord:
    algorithm: str
    dataset: str
    epsilon_total: float
    internal_k: Optional[int]
    repeat_index: int
    cost_dp: float
    cost_lloyd: float
    cost_gap: float
    seed: int = 0
    invariant_violations: int = 0

    @property
    def series(self):
        return self.algorithm if self.internal_k is None else f"{self.algorithm}-k{self.internal_k}"

    def sort_key(self):
        return (self.dataset, self.algorithm, -1 if self.internal_k is None else self.internal_k,
                self.epsilon_total, self.repeat_index)


@dataclass(frozen=True)
class GapSummary:
    dataset: str
    algorithm: str
    internal_k: Optional[int]
    epsilon: float
    n: int
    mean_gap: float
    std_gap: float

    @property
    def series(self):
        return self.algorithm if self.internal_k is None else f"{self.algorithm}-k{self.internal_k}"


def cost_gap(cost_dp, cost_lloyd):
    """``|cost_dp - cost_lloyd| / cost_lloyd``."""
    if not cost_lloyd > 0:
        raise ValueError(f"cost_lloyd must be positive, got {cost_lloyd}")
    return abs(cost_dp - cost_lloyd) / cost_lloyd


def aggregate(records):
    """Mean and sample standard deviation of the gap per (dataset, algorithm, internalK, epsilon).

    Records are ordered deterministically before summation, so the result does
    not depend on the order in which runs finished.
    """
    records = list(records)
    if not records:
        raise ValueError("cannot aggregate an empty record list")
    groups = defaultdict(list)
    for rec in sorted(records, key=CostGapRecord.sort_key):
        groups[(rec.dataset, rec.algorithm, rec.internal_k, rec.epsilon_total)].append(rec.cost_gap)
    out = []
    for (ds, alg, ik, eps), gaps in groups.items():
        std = statistics.stdev(gaps) if len(gaps) > 1 else 0.0
        out.append(GapSummary(ds, alg, ik, eps, len(gaps), statistics.fmean(gaps), std))
    out.sort(key=lambda s: (s.dataset, s.algorithm, -1 if s.internal_k is None else s.internal_k, s.epsilon))
    return out


def improvement_ratio(baseline_means, subcluster_means):
    """Mean-over-epsilon baseline gap divided by mean-over-epsilon subcluster gap.

    Both arguments map epsilon -> mean gap and must cover the same epsilons.
    """
    if set(baseline_means) != set(subcluster_means):
        raise ValueError("baseline and subcluster results cover different epsilon grids")
    if not baseline_means:
        raise ValueError("no epsilon values to compare")
    grid = sorted(baseline_means)
    num = statistics.fmean(baseline_means[e] for e in grid)
    den = statistics.fmean(subcluster_means[e] for e in grid)
    if den == 0:
        return INFINITE_IMPROVEMENT
    return num / den
