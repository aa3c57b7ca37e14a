"""Differentially private k-means with convergent-zone sampling.

Each iteration runs one Lloyd step, builds the convergent zone of every
cluster, narrows it to a sampling zone (random hemisphere ball for the
baseline, count-weighted sub-cluster for ``subcluster``), and replaces the
Lloyd centroid by a zone member drawn with the exponential mechanism. After
``T`` iterations the centroids are released with Laplace noise.
"""

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .core import Dataset, assign, check_centroids, init_centroids, recenter, wcss_cost
from .mechanisms import (
    PrivacyBudget,
    ScoredCandidateSet,
    exp_mechanism,
    laplace_perturb,
    laplace_scale,
    score_all,
)
from .zones import baseline_candidates, baseline_orientation, convergent_zone, subcluster_sampling_zone

BASELINE = "baseline"
SUBCLUSTER = "subcluster"
VARIANTS = (BASELINE, SUBCLUSTER)
DEFAULT_ITERATIONS = 10


@dataclass(frozen=True)
class Strategy:
    variant: str = SUBCLUSTER
    internal_k: int = 4

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown strategy {self.variant!r}; expected one of {VARIANTS}")
        if self.variant == SUBCLUSTER and self.internal_k < 2:
            raise ValueError(f"subcluster strategy needs internalK >= 2, got {self.internal_k}")

    @property
    def tag(self):
        return self.variant if self.variant == BASELINE else f"{self.variant}-k{self.internal_k}"


@dataclass
class ClusterStep:
    """What happened to one cluster in one iteration."""

    t: int
    cluster: int
    s_prev: np.ndarray
    s_lloyd: np.ndarray
    radius: float
    zone_size: int
    sampled: np.ndarray = None
    invariant_ok: bool = True
    skipped: bool = False
    reason: str = ""
    sampling_zone_size: int = 0

    def to_dict(self):
        d = asdict(self)
        for key in ("s_prev", "s_lloyd", "sampled"):
            if d[key] is not None:
                d[key] = [float(x) for x in d[key]]
        return d


@dataclass
class DpRunResult:
    final_centroids: np.ndarray
    pre_noise_centroids: np.ndarray
    trace: list
    cost_dp: float
    budget: PrivacyBudget
    seed: int
    strategy: Strategy = field(default_factory=Strategy)
    initial_centroids: np.ndarray = None

    def trace_json(self):
        """Published artefacts of the run (sampling-zone sizes, radii, centroids) as JSON."""
        payload = {
            "seed": self.seed,
            "strategy": self.strategy.tag,
            "budget": asdict(self.budget),
            "cost_dp": self.cost_dp,
            "trace": [step.to_dict() for step in self.trace],
        }
        return json.dumps(payload, indent=1, sort_keys=True)


def invariant_holds(sampled, s_lloyd, s_prev):
    """Whether ``|sampled - s_lloyd| < |s_lloyd - s_prev|`` holds strictly."""
    return _kernels.distance(sampled, s_lloyd) < _kernels.distance(s_prev, s_lloyd)


def dp_kmeans_iteration(data, current, strategy, eps_exp, rng, t=0):
    """One private Lloyd step. Returns ``(new_centroids, steps)`` with one step per cluster."""
    if not eps_exp > 0:
        raise ValueError(f"eps_exp must be positive, got {eps_exp}")
    pts = data.points if isinstance(data, Dataset) else np.ascontiguousarray(data, dtype=np.float64)
    current = check_centroids(current, pts.shape[1])
    asg = assign(pts, current)
    lloyd_cents = recenter(pts, asg, current)
    out = lloyd_cents.copy()
    steps = []
    for i in range(current.shape[0]):
        s_prev, s_lloyd = current[i], lloyd_cents[i]
        zone = convergent_zone(pts[asg.labels == i], s_lloyd, s_prev)
        step = ClusterStep(t=t, cluster=i, s_prev=s_prev.copy(), s_lloyd=s_lloyd.copy(),
                           radius=zone.radius, zone_size=zone.size)
        if zone.radius == 0.0 or zone.size == 0:
            step.skipped = True
            step.reason = "zero radius" if zone.radius == 0.0 else "empty zone"
            steps.append(step)
            continue

        if strategy.variant == BASELINE:
            ball = baseline_orientation(s_lloyd, s_prev, rng)
            szone = baseline_candidates(zone, ball)
        else:
            szone, _ = subcluster_sampling_zone(zone, strategy.internal_k, rng)

        cset = ScoredCandidateSet(szone.candidate_points, score_all(szone.candidate_points, s_lloyd),
                                  sensitivity=zone.radius)
        pick = szone.candidate_points[exp_mechanism(cset, eps_exp, rng)].copy()
        out[i] = pick
        step.sampled = pick
        step.sampling_zone_size = szone.size
        step.invariant_ok = invariant_holds(pick, s_lloyd, s_prev)
        steps.append(step)
    return out, steps


def finalize_laplace(cents, cluster_sizes, eps_lap, d, rng):
    """Per-coordinate Laplace noise with scale ``((d + 1) / n_i) / eps_lap``, clamped to [0, 1].

    Empty clusters are noised as if they held a single point.
    """
    if not eps_lap > 0:
        raise ValueError(f"eps_lap must be positive, got {eps_lap}")
    c = check_centroids(cents)
    sizes = np.asarray(cluster_sizes)
    if sizes.shape[0] != c.shape[0]:
        raise ValueError("cluster_sizes length does not match the number of centroids")
    out = np.empty_like(c)
    for i in range(c.shape[0]):
        out[i] = laplace_perturb(c[i], laplace_scale(d, sizes[i], eps_lap), rng)
    return np.clip(out, 0.0, 1.0)


def run_dp_kmeans(data, k, budget, strategy, seed, init=None):
    """Full private run: seeded initialisation, ``budget.iterations`` steps, Laplace release."""
    if not isinstance(data, Dataset):
        data = Dataset(data)
    if not data.normalized:
        raise ValueError("run_dp_kmeans expects a dataset normalized to [0, 1]^d")
    rng = np.random.default_rng(seed)
    # drawn first so that a plain Lloyd run seeded identically starts from the same centroids
    start = init_centroids(data, k, rng) if init is None else check_centroids(init, data.n_dims)
    cents = start.copy()
    trace = []
    for t in range(1, budget.iterations + 1):
        cents, steps = dp_kmeans_iteration(data, cents, strategy, budget.eps_exp, rng, t=t)
        trace.extend(steps)
    sizes = assign(data, cents).cluster_sizes
    final = finalize_laplace(cents, sizes, budget.eps_lap, data.n_dims, rng)
    return DpRunResult(final_centroids=final, pre_noise_centroids=cents, trace=trace,
                       cost_dp=wcss_cost(data, final), budget=budget, seed=seed,
                       strategy=strategy, initial_centroids=start)


def audit_invariant(trace):
    """Check every sampled step; returns ``(ok, [(t, cluster), ...])`` for the violations.

    A step fails if its recorded flag is false or if the recorded points do not
    satisfy the strict inequality when re-measured.
    """
    violations = []
    for step in trace:
        if step.skipped or step.sampled is None:
            continue
        if not (step.invariant_ok and invariant_holds(step.sampled, step.s_lloyd, step.s_prev)):
            violations.append((step.t, step.cluster))
    return not violations, violations
