"""Non-private k-means primitives.

Centroid sets are plain ``(k, d)`` float arrays. Points live in a
:class:`Dataset`, which carries the row matrix plus a normalization flag.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels

DEFAULT_TOL = 1e-6


@dataclass(frozen=True)
class Dataset:
    points: np.ndarray
    normalized: bool = False
    name: str = "custom"
    labels: np.ndarray = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError(f"points must be a 2-D array, got shape {pts.shape}")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"dataset needs N >= 1 and d >= 1, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("dataset contains non-finite values")
        if self.normalized and (pts.min() < 0.0 or pts.max() > 1.0):
            raise ValueError("normalized dataset has coordinates outside [0, 1]")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n_points(self):
        return self.points.shape[0]

    @property
    def n_dims(self):
        return self.points.shape[1]

    def __len__(self):
        return self.n_points


@dataclass(frozen=True)
class Assignment:
    labels: np.ndarray
    cluster_sizes: np.ndarray = field(repr=False)

    @property
    def k(self):
        return len(self.cluster_sizes)


def _points(data):
    return data.points if isinstance(data, Dataset) else np.ascontiguousarray(data, dtype=np.float64)


def check_centroids(cents, n_dims=None):
    """Coerce ``cents`` to a contiguous ``(k, d)`` float array and validate it."""
    c = np.ascontiguousarray(cents, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] < 1:
        raise ValueError(f"centroids must have shape (k >= 1, d), got {c.shape}")
    if n_dims is not None and c.shape[1] != n_dims:
        raise ValueError(f"dimension mismatch: data has d={n_dims}, centroids have d={c.shape[1]}")
    if not np.all(np.isfinite(c)):
        raise ValueError("centroids contain non-finite values")
    return c


def init_centroids(data, k, rng):
    """Pick ``k`` distinct rows of ``data`` uniformly at random, without replacement."""
    pts = _points(data)
    if k < 1 or k > pts.shape[0]:
        raise ValueError(f"k must be in [1, N={pts.shape[0]}], got {k}")
    idx = rng.choice(pts.shape[0], size=k, replace=False)
    return pts[idx].copy()


def assign(data, cents):
    pts = _points(data)
    c = check_centroids(cents, pts.shape[1])
    labels = _kernels.nearest_labels(pts, c)
    sizes = np.bincount(labels, minlength=c.shape[0]).astype(np.int64)
    return Assignment(labels=labels, cluster_sizes=sizes)


def recenter(data, asg, prev):
    """Mean of each cluster's points; an empty cluster keeps its previous centroid."""
    pts = _points(data)
    p = check_centroids(prev, pts.shape[1])
    if len(asg.labels) != pts.shape[0] or asg.k != p.shape[0]:
        raise ValueError("assignment is inconsistent with data or previous centroids")
    means, _ = _kernels.cluster_means(pts, np.asarray(asg.labels, dtype=np.int64), p)
    return means


def wcss_cost(data, cents):
    """Within-cluster sum of squared Euclidean distances under nearest-centroid assignment."""
    pts = _points(data)
    c = check_centroids(cents, pts.shape[1])
    return _kernels.wcss(pts, c)


@dataclass(frozen=True)
class LloydResult:
    centroids: np.ndarray
    cost: float
    iterations: int
    costs: tuple = ()

    def __iter__(self):
        # allows ``cents, cost, iters = lloyd(...)``
        return iter((self.centroids, self.cost, self.iterations))


def lloyd_from(data, init, max_iters=300, tol=DEFAULT_TOL):
    """Lloyd's iterations starting from explicit initial centroids."""
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    if tol < 0:
        raise ValueError("tol must be >= 0")
    pts = _points(data)
    cents = check_centroids(init, pts.shape[1]).copy()
    costs = []
    it = 0
    for it in range(1, max_iters + 1):
        labels = _kernels.nearest_labels(pts, cents)
        new, _ = _kernels.cluster_means(pts, labels, cents)
        shift = np.sqrt(((new - cents) ** 2).sum(axis=1)).max()
        cents = new
        costs.append(_kernels.wcss(pts, cents))
        if shift <= tol:
            break
    return LloydResult(cents, _kernels.wcss(pts, cents), it, tuple(costs))


def lloyd(data, k, max_iters=300, tol=DEFAULT_TOL, rng=None):
    """Plain Lloyd's k-means seeded by :func:`init_centroids`.

    Returns a :class:`LloydResult`, which unpacks as ``(centroids, cost, iterations)``.
    """
    if rng is None:
        rng = np.random.default_rng()
    init = init_centroids(data, k, rng)
    return lloyd_from(data, init, max_iters=max_iters, tol=tol)


def normalize(data):
    """Per-coordinate min-max scaling into [0, 1]; constant coordinates map to 0."""
    pts = _points(data)
    lo = pts.min(axis=0)
    span = pts.max(axis=0) - lo
    safe = np.where(span > 0, span, 1.0)
    out = np.where(span > 0, (pts - lo) / safe, 0.0)
    # guard against 1 + ulp from the division
    np.clip(out, 0.0, 1.0, out=out)
    if isinstance(data, Dataset):
        return Dataset(out, normalized=True, name=data.name, labels=data.labels)
    return Dataset(out, normalized=True)
