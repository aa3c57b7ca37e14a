"""Hot numeric kernels with a numba path and a pure-numpy fallback.

Set ``DPSUBKMEANS_DISABLE_NUMBA=1`` before import to force the numpy path.
Both paths return identical labels; floating sums may differ in the last
bits, so every caller that compares a distance against a radius uses the
same kernel for both sides of the comparison.
"""

import os

import numpy as np

_DISABLED = os.environ.get("DPSUBKMEANS_DISABLE_NUMBA", "").strip().lower() in (
    "1",
    "true",
    "yes",
)

try:
    if _DISABLED:
        raise ImportError("numba disabled by environment")
    from numba import njit
except ImportError:  # pragma: no cover - depends on environment
    njit = None

USING_NUMBA = njit is not None


# --------------------------------------------------------------------------
# numpy implementations

def _np_nearest_labels(points, centroids):
    # (N, k) squared distances; argmin returns the first minimum -> lowest index wins ties
    sq = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(sq, axis=1).astype(np.int64)


def _np_cluster_means(points, labels, prev):
    k, d = prev.shape
    counts = np.bincount(labels, minlength=k).astype(np.int64)
    sums = np.zeros((k, d))
    np.add.at(sums, labels, points)
    out = prev.copy()
    nz = counts > 0
    out[nz] = sums[nz] / counts[nz, None]
    return out, counts


def _np_wcss(points, centroids):
    sq = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return float(sq.min(axis=1).sum())


def _np_distances_to(points, center):
    # row-wise reduction over a C-contiguous array: a row's result does not depend on N
    diff = np.ascontiguousarray(points - center)
    return np.sqrt((diff * diff).sum(axis=1))


# --------------------------------------------------------------------------
# numba implementations

if USING_NUMBA:

    @njit(cache=True)
    def _nb_nearest_labels(points, centroids):
        n, d = points.shape
        k = centroids.shape[0]
        labels = np.empty(n, dtype=np.int64)
        for j in range(n):
            best = np.inf
            arg = 0
            for c in range(k):
                acc = 0.0
                for m in range(d):
                    diff = points[j, m] - centroids[c, m]
                    acc += diff * diff
                if acc < best:
                    best = acc
                    arg = c
            labels[j] = arg
        return labels

    @njit(cache=True)
    def _nb_cluster_means(points, labels, prev):
        k, d = prev.shape
        sums = np.zeros((k, d))
        counts = np.zeros(k, dtype=np.int64)
        for j in range(points.shape[0]):
            c = labels[j]
            counts[c] += 1
            for m in range(d):
                sums[c, m] += points[j, m]
        out = prev.copy()
        for c in range(k):
            if counts[c] > 0:
                for m in range(d):
                    out[c, m] = sums[c, m] / counts[c]
        return out, counts

    @njit(cache=True)
    def _nb_wcss(points, centroids):
        n, d = points.shape
        k = centroids.shape[0]
        total = 0.0
        for j in range(n):
            best = np.inf
            for c in range(k):
                acc = 0.0
                for m in range(d):
                    diff = points[j, m] - centroids[c, m]
                    acc += diff * diff
                if acc < best:
                    best = acc
            total += best
        return total

    @njit(cache=True)
    def _nb_distances_to(points, center):
        n, d = points.shape
        out = np.empty(n)
        for j in range(n):
            acc = 0.0
            for m in range(d):
                diff = points[j, m] - center[m]
                acc += diff * diff
            out[j] = np.sqrt(acc)
        return out


# --------------------------------------------------------------------------
# public dispatch

def nearest_labels(points, centroids):
    """Index of the nearest centroid per point (squared Euclidean, first index on ties)."""
    if USING_NUMBA:
        return _nb_nearest_labels(points, centroids)
    return _np_nearest_labels(points, centroids)


def cluster_means(points, labels, prev):
    """Per-cluster means and counts; empty clusters keep their row of ``prev``."""
    if USING_NUMBA:
        return _nb_cluster_means(points, labels, prev)
    return _np_cluster_means(points, labels, prev)


def wcss(points, centroids):
    if USING_NUMBA:
        return float(_nb_wcss(points, centroids))
    return _np_wcss(points, centroids)


def distances_to(points, center):
    """Euclidean distance of every row of ``points`` to ``center``."""
    if USING_NUMBA:
        return _nb_distances_to(points, center)
    return _np_distances_to(points, center)


def distance(a, b):
    """Distance between two points, computed by the same kernel as ``distances_to``."""
    return float(distances_to(np.asarray(a, dtype=np.float64)[None, :], np.asarray(b, dtype=np.float64))[0])
