"""Cross-path agreement between the jitted kernels and their fallbacks."""

import numpy as np

from qga import kernels


def random_inputs(seed, items=40, dim=12, rows=300):
    rng = np.random.default_rng(seed)
    vec = rng.normal(size=(items, dim))
    v1 = rng.integers(0, items, size=rows).astype(np.int64)
    v2 = rng.integers(0, items, size=rows).astype(np.int64)
    p = rng.integers(0, items, size=rows).astype(np.int64)
    return vec, v1, v2, p


def test_pair_costs_paths_agree():
    vec, v1, v2, p = random_inputs(3)
    c_loop = np.empty(len(v1))
    d_loop = np.empty(len(v1), dtype=np.int8)
    kernels._pair_costs_impl(vec, v1, v2, p, c_loop, d_loop)
    c_np = np.empty(len(v1))
    d_np = np.empty(len(v1), dtype=np.int8)
    kernels._pair_costs_numpy(vec, v1, v2, p, c_np, d_np)
    np.testing.assert_allclose(c_loop, c_np, rtol=1e-12, atol=1e-12)
    assert np.array_equal(d_loop, d_np)
    c_active, d_active = kernels.pair_costs(vec, v1, v2, p)
    np.testing.assert_allclose(c_active, c_loop, rtol=1e-12, atol=1e-12)
    assert np.array_equal(d_active, d_loop)


def test_sgd_epoch_active_matches_interpreted_bitwise():
    rng = np.random.default_rng(9)
    vec_a = rng.normal(size=(30, 8))
    vec_b = vec_a.copy()
    pos = rng.integers(0, 30, size=(120, 3)).astype(np.int64)
    neg = pos.copy()
    neg[:, 2] = rng.integers(0, 30, size=120)
    loss_a = kernels.sgd_epoch(vec_a, pos, neg, 0.01, 1.0)
    loss_b = kernels._sgd_epoch_impl(vec_b, pos, neg, 0.01, 1.0)
    assert loss_a == loss_b
    assert np.array_equal(vec_a, vec_b)


def test_sgd_epoch_no_violations_no_updates():
    # negatives already far beyond the margin: hinge stays inactive
    vec = np.zeros((4, 4))
    vec[0] = [1, 0, 0, 0]
    vec[1] = [1, 0, 0, 0]  # predicate: 0 + p = o exactly
    vec[2] = [2, 0, 0, 0]
    vec[3] = [100, 0, 0, 0]
    pos = np.array([[0, 1, 2]], dtype=np.int64)
    neg = np.array([[0, 1, 3]], dtype=np.int64)
    before = vec.copy()
    loss = kernels.sgd_epoch(vec, pos, neg, 0.1, 1.0)
    assert loss == 0.0
    assert np.array_equal(vec, before)


def test_pair_costs_direction_flag():
    vec = np.zeros((3, 2))
    vec[0] = [0.0, 0.0]  # v1
    vec[1] = [1.0, 0.0]  # v2
    vec[2] = [1.0, 0.0]  # p: v1 + p == v2 exactly
    costs, dirs = kernels.pair_costs(
        vec, np.array([0]), np.array([1]), np.array([2])
    )
    assert costs[0] == 0.0 and dirs[0] == 0
    costs, dirs = kernels.pair_costs(
        vec, np.array([1]), np.array([0]), np.array([2])
    )
    assert costs[0] == 0.0 and dirs[0] == 1
