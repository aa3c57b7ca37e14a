#!/usr/bin/env python3
"""Compare the numba kernels with the pure-numpy fallback.

Each backend runs in its own interpreter because the backend is fixed at
import time by DPSUBKMEANS_DISABLE_NUMBA.

    python benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import json, sys, time
import numpy as np
from dpsubkmeans import _kernels
from dpsubkmeans.datasets import make_blobs
from dpsubkmeans.dp_kmeans import Strategy, run_dp_kmeans
from dpsubkmeans.mechanisms import split_total

repeats = int(sys.argv[1])
rng = np.random.default_rng(0)
pts = rng.random((1797, 64))
cents = rng.random((10, 64))
labels = _kernels.nearest_labels(pts, cents)
center = rng.random(64)

def best(fn):
    fn()  # warm-up / JIT compile
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)

blobs = make_blobs(200, [[0, 0, 0], [8, 0, 0], [0, 8, 0], [0, 0, 8]], 1.0, seed=1)
out = {
    "numba": _kernels.USING_NUMBA,
    "nearest_labels 1797x64 k=10": best(lambda: _kernels.nearest_labels(pts, cents)),
    "cluster_means 1797x64 k=10": best(lambda: _kernels.cluster_means(pts, labels, cents)),
    "wcss 1797x64 k=10": best(lambda: _kernels.wcss(pts, cents)),
    "distances_to 1797x64": best(lambda: _kernels.distances_to(pts, center)),
    "dp run subcluster 800x3 k=4 T=10": best(
        lambda: run_dp_kmeans(blobs, 4, split_total(1.0, 10), Strategy("subcluster", 4), 3)),
}
print(json.dumps(out))
"""


def run(disabled, repeats):
    env = dict(os.environ)
    env["DPSUBKMEANS_DISABLE_NUMBA"] = "1" if disabled else "0"
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-c", WORKER, str(repeats)], env=env,
                          capture_output=True, text=True, check=True)
    result = json.loads(proc.stdout.strip().splitlines()[-1])
    result["wall incl. import/compile"] = time.perf_counter() - t0
    return result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    nb = run(False, args.repeats)
    np_ = run(True, args.repeats)
    if not nb.pop("numba"):
        print("warning: numba unavailable, both columns use numpy", file=sys.stderr)
    np_.pop("numba")
    print(f"{'kernel':<36}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for key in nb:
        a, b = nb[key] * 1e3, np_[key] * 1e3
        print(f"{key:<36}{a:>12.3f}{b:>12.3f}{b / a:>10.2f}")


if __name__ == "__main__":
    main()
