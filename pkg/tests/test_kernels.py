import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dpsubkmeans import _kernels

needs_numba = pytest.mark.skipif(not _kernels.USING_NUMBA, reason="numba path disabled")

coords = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


@st.composite
def instances(draw):
    n = draw(st.integers(1, 40))
    k = draw(st.integers(1, 6))
    d = draw(st.integers(1, 5))
    pts = draw(arrays(np.float64, (n, d), elements=coords))
    cents = draw(arrays(np.float64, (k, d), elements=coords))
    return pts, cents


@needs_numba
@settings(max_examples=60, deadline=None)
@given(instances())
def test_numba_and_numpy_labels_agree(inst):
    pts, cents = inst
    np.testing.assert_array_equal(_kernels._nb_nearest_labels(pts, cents), _kernels._np_nearest_labels(pts, cents))


@needs_numba
@settings(max_examples=60, deadline=None)
@given(instances())
def test_numba_and_numpy_means_and_cost_agree(inst):
    pts, cents = inst
    labels = _kernels._np_nearest_labels(pts, cents)
    m_nb, c_nb = _kernels._nb_cluster_means(pts, labels, cents)
    m_np, c_np = _kernels._np_cluster_means(pts, labels, cents)
    np.testing.assert_array_equal(c_nb, c_np)
    np.testing.assert_allclose(m_nb, m_np, rtol=1e-12, atol=1e-12)
    assert _kernels._nb_wcss(pts, cents) == pytest.approx(_kernels._np_wcss(pts, cents), rel=1e-12, abs=1e-12)


@needs_numba
def test_numba_and_numpy_distances_agree(rng):
    pts = rng.random((300, 13))
    c = rng.random(13)
    np.testing.assert_allclose(_kernels._nb_distances_to(pts, c), _kernels._np_distances_to(pts, c), rtol=1e-14)


@pytest.mark.parametrize("impl", ["_np_distances_to", "_nb_distances_to"])
def test_single_row_distance_is_bitwise_identical_to_batch(impl, rng):
    fn = getattr(_kernels, impl, None)
    if fn is None:
        pytest.skip("numba path disabled")
    for d in (1, 2, 4, 13, 30, 64):
        pts = rng.random((257, d))
        c = rng.random(d)
        batch = fn(pts, c)
        for j in range(0, 257, 17):
            assert fn(np.ascontiguousarray(pts[j:j + 1]), c)[0] == batch[j]


def test_env_flag_selects_numpy_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, DPSUBKMEANS_DISABLE_NUMBA="1")
    code = "from dpsubkmeans import _kernels; print(_kernels.USING_NUMBA)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"
