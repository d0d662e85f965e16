"""Numeric hot kernels with optional numba acceleration.

Two kernels carry essentially all the floating-point work:

* ``sgd_epoch`` — one margin-ranking SGD epoch over pre-sampled
  positive/negative triple pairs (sequential, order-dependent).
* ``pair_costs`` — batched two-direction translation residuals
  ``min(|v1 + p - v2|, |v2 + p - v1|)`` for many (v1, v2, p) rows.

By default both are compiled with ``numba.njit``.  Setting the environment
variable ``QGA_PURE_NUMPY=1`` (or any value other than ``0``) selects the
fallback path: the interpreted loop for ``sgd_epoch`` (same float ops in the
same order, so results stay bitwise identical) and a vectorized numpy
implementation for ``pair_costs``.  ``benchmarks/bench_kernels.py`` compares
the two paths.
"""

from __future__ import annotations

import math
import os

import numpy as np

_ENV_FLAG = "QGA_PURE_NUMPY"


def _pure_numpy_requested() -> bool:
    return os.environ.get(_ENV_FLAG, "0").strip() not in ("", "0")


NUMBA_ENABLED = False
if not _pure_numpy_requested():
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False


def _sgd_epoch_impl(vec, pos, neg, lr, margin):
    """Sequential margin-SGD over one epoch; returns the mean hinge loss.

    vec: (items, dim) float64, updated in place.
    pos/neg: (n, 3) int64 id triples (s, p, o); neg shares the predicate.
    """
    n = pos.shape[0]
    d = vec.shape[1]
    rp = np.empty(d)
    rn = np.empty(d)
    total = 0.0
    for t in range(n):
        s = pos[t, 0]
        p = pos[t, 1]
        o = pos[t, 2]
        cs = neg[t, 0]
        co = neg[t, 2]
        sq_p = 0.0
        sq_n = 0.0
        for i in range(d):
            rp[i] = vec[s, i] + vec[p, i] - vec[o, i]
            sq_p += rp[i] * rp[i]
            rn[i] = vec[cs, i] + vec[p, i] - vec[co, i]
            sq_n += rn[i] * rn[i]
        d_pos = math.sqrt(sq_p)
        d_neg = math.sqrt(sq_n)
        loss = margin + d_pos - d_neg
        if loss > 0.0:
            total += loss
            inv_p = 1.0 / d_pos if d_pos > 1e-12 else 0.0
            inv_n = 1.0 / d_neg if d_neg > 1e-12 else 0.0
            for i in range(d):
                gp = rp[i] * inv_p
                gn = rn[i] * inv_n
                vec[s, i] -= lr * gp
                vec[o, i] += lr * gp
                vec[p, i] -= lr * (gp - gn)
                vec[cs, i] += lr * gn
                vec[co, i] -= lr * gn
    return total / n if n else 0.0


def _pair_costs_impl(vec, v1, v2, p, costs, dirs):
    """Row-wise min over the two translation directions.

    dirs[t] = 0 when |v1 + p - v2| <= |v2 + p - v1| (triple read v1 -> v2),
    1 otherwise.
    """
    n = v1.shape[0]
    d = vec.shape[1]
    for t in range(n):
        a = v1[t]
        b = v2[t]
        q = p[t]
        sq_f = 0.0
        sq_r = 0.0
        for i in range(d):
            rf = vec[a, i] + vec[q, i] - vec[b, i]
            rr = vec[b, i] + vec[q, i] - vec[a, i]
            sq_f += rf * rf
            sq_r += rr * rr
        cf = math.sqrt(sq_f)
        cr = math.sqrt(sq_r)
        if cr < cf:
            costs[t] = cr
            dirs[t] = 1
        else:
            costs[t] = cf
            dirs[t] = 0


def _pair_costs_numpy(vec, v1, v2, p, costs, dirs):
    a = vec[v1]
    b = vec[v2]
    q = vec[p]
    rf = a + q - b
    rr = b + q - a
    cf = np.sqrt(np.einsum("ij,ij->i", rf, rf))
    cr = np.sqrt(np.einsum("ij,ij->i", rr, rr))
    rev = cr < cf
    np.copyto(costs, np.where(rev, cr, cf))
    np.copyto(dirs, rev.astype(np.int8))


if NUMBA_ENABLED:
    sgd_epoch = njit(cache=True)(_sgd_epoch_impl)
    _pair_costs_active = njit(cache=True)(_pair_costs_impl)
else:
    sgd_epoch = _sgd_epoch_impl
    _pair_costs_active = _pair_costs_numpy


def pair_costs(vec: np.ndarray, v1, v2, p):
    """Batched triple assembly costs; returns (costs, dirs) arrays."""
    v1 = np.ascontiguousarray(v1, dtype=np.int64)
    v2 = np.ascontiguousarray(v2, dtype=np.int64)
    p = np.ascontiguousarray(p, dtype=np.int64)
    costs = np.empty(v1.shape[0], dtype=np.float64)
    dirs = np.empty(v1.shape[0], dtype=np.int8)
    _pair_costs_active(vec, v1, v2, p, costs, dirs)
    return costs, dirs
