"""Convergent zones and the two ways of carving a sampling zone out of one.

A convergent zone for cluster ``i`` at step ``t`` is the open ball centred on
the fresh Lloyd centroid whose radius is the distance back to the centroid
that produced the assignment. Any replacement centroid drawn strictly inside
that ball keeps the iteration convergent, so both sampling strategies below
only ever return zone members.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import lloyd_from

SUBCLUSTER_MAX_ITERS = 20
SUBCLUSTER_TOL = 1e-6


class EmptyZoneError(ValueError):
    """Raised when a sampling zone is requested from a zone with no member points."""


@dataclass(frozen=True)
class ConvergentZone:
    center: np.ndarray
    radius: float
    member_points: np.ndarray
    member_index: np.ndarray  # row positions within the cluster's point set

    @property
    def size(self):
        return self.member_points.shape[0]

    def contains(self, points):
        """Strict membership test, using the same distance kernel that built the zone."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return _kernels.distances_to(np.ascontiguousarray(pts), self.center) < self.radius


@dataclass(frozen=True)
class BaselineSamplingBall:
    direction: np.ndarray
    center: np.ndarray
    radius: float


@dataclass(frozen=True)
class SubClusterPartition:
    sub_centroids: np.ndarray
    sub_assignments: np.ndarray
    counts: np.ndarray
    probabilities: np.ndarray


@dataclass(frozen=True)
class SamplingZone:
    candidate_points: np.ndarray
    source: str = ""

    @property
    def size(self):
        return self.candidate_points.shape[0]


def convergent_zone(cluster_points, s_t, s_prev):
    center = np.asarray(s_t, dtype=np.float64)
    prev = np.asarray(s_prev, dtype=np.float64)
    pts = np.ascontiguousarray(np.asarray(cluster_points, dtype=np.float64).reshape(-1, center.shape[0]))
    radius = _kernels.distance(prev, center)
    if radius == 0.0 or pts.shape[0] == 0:
        idx = np.zeros(0, dtype=np.int64)
    else:
        idx = np.flatnonzero(_kernels.distances_to(pts, center) < radius)
    return ConvergentZone(center=center, radius=radius, member_points=pts[idx], member_index=idx)


def hemisphere_direction(axis, rng):
    """Uniform unit vector on the closed hemisphere ``{u : u . axis >= 0}``.

    An isotropic direction is reflected through the origin when it points
    the wrong way, which maps the uniform sphere law onto the hemisphere.
    """
    a = np.asarray(axis, dtype=np.float64)
    while True:
        g = rng.standard_normal(a.shape[0])
        nrm = np.linalg.norm(g)
        if nrm > 0:
            break
    u = g / nrm
    if np.dot(u, a) < 0:
        u = -u
    return u


def baseline_orientation(s_t, s_prev, rng):
    """Orientation controller and sampling ball for the baseline strategy.

    The ball is the largest one tangent to the zone boundary along the sampled
    direction: centre ``s_t + (r/2) u`` and radius ``r/2``.
    """
    s_t = np.asarray(s_t, dtype=np.float64)
    s_prev = np.asarray(s_prev, dtype=np.float64)
    move = s_t - s_prev
    r = _kernels.distance(s_t, s_prev)
    if r == 0.0:
        raise ValueError("baseline orientation needs a non-zero centroid displacement")
    u = hemisphere_direction(move, rng)
    return BaselineSamplingBall(direction=u, center=s_t + 0.5 * r * u, radius=0.5 * r)


def baseline_candidates(zone, ball):
    """Zone members inside the sampling ball; falls back to all members, then to nothing."""
    if zone.size == 0:
        return SamplingZone(zone.member_points, source="empty")
    inside = _kernels.distances_to(zone.member_points, ball.center) < ball.radius
    if inside.any():
        return SamplingZone(zone.member_points[inside], source="ball")
    return SamplingZone(zone.member_points, source="zone")


def partition_zone(zone, internal_k, rng):
    """Lloyd sub-clustering of the zone members with count-proportional weights."""
    if zone.size == 0:
        raise EmptyZoneError("cannot sub-cluster an empty convergent zone")
    if internal_k < 1:
        raise ValueError(f"internalK must be >= 1, got {internal_k}")
    pts = zone.member_points
    k_sub = min(int(internal_k), pts.shape[0])
    init = pts[rng.choice(pts.shape[0], size=k_sub, replace=False)]
    res = lloyd_from(pts, init, max_iters=SUBCLUSTER_MAX_ITERS, tol=SUBCLUSTER_TOL)
    labels = _kernels.nearest_labels(pts, res.centroids)
    counts = np.bincount(labels, minlength=k_sub).astype(np.int64)
    probs = counts / counts.sum()
    return SubClusterPartition(sub_centroids=res.centroids, sub_assignments=labels,
                               counts=counts, probabilities=probs)


def sample_subcluster(partition, rng):
    """Index of a sub-cluster drawn with probability proportional to its size."""
    cdf = np.cumsum(partition.counts)
    # integer draw: exact proportionality, and empty parts are never hit
    u = int(rng.integers(cdf[-1]))
    return int(np.searchsorted(cdf, u, side="right"))


def subcluster_sampling_zone(zone, internal_k, rng):
    partition = partition_zone(zone, internal_k, rng)
    j = sample_subcluster(partition, rng)
    members = zone.member_points[partition.sub_assignments == j]
    return SamplingZone(members, source=f"subcluster:{j}"), partition
