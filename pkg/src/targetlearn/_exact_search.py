"""Exhaustive search internals for depth-bounded policy trees.

The search maximizes ``sum_i pi(x_i) * r_i`` over all axis-aligned trees of
a declared depth.  Candidate thresholds at a node are the midpoints between
consecutive distinct sorted values of each feature plus one degenerate
all-left split; the optimal action of a leaf is the sign of its summed
rewards (ties to -1).

Split evaluation never recomputes sums from scratch: the depth-1 solver
does one prefix-sum sweep per sorted feature order, and the depth-2 kernel
sweeps root boundaries while maintaining, per sub-feature, a segment tree
over group prefix sums whose root exposes the running max/min prefix.  The
value of the best single split of a unit set with total reward T given the
prefix-sum extremes follows from |L| + |T - L| = max(|T|, |2L - T|).

Ties are broken deterministically: lower feature index first, then lower
threshold, with the degenerate split ordered last within its feature.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .tree import TreeNode

__all__ = ["solve_depth1", "solve_exact", "evaluate_objective"]


def evaluate_objective(actions: np.ndarray, rewards: np.ndarray) -> float:
    """Canonical objective (1/2N) * sum_i pi_i * r_i."""
    n = rewards.shape[0]
    return float(actions @ rewards) / (2.0 * n) if n else 0.0


def _leaf(total: float) -> TreeNode:
    return TreeNode(action=1 if total > 0 else -1)


def solve_depth1(X: np.ndarray, r: np.ndarray, min_leaf: int = 0):
    """Best depth-<=1 tree on (X, r).

    Returns ``(raw_value, node, n_candidates)`` where ``raw_value`` is the
    unnormalized objective ``sum pi * r`` attained.  ``min_leaf > 0``
    restricts real splits to those leaving at least that many units on
    each side and drops the degenerate all-left candidate (the caller then
    represents the constant option as a leaf).
    """
    n = r.shape[0]
    if n == 0:
        return 0.0, TreeNode(action=-1), 0
    total = float(np.sum(r))
    p = X.shape[1] if X.ndim == 2 else 0
    best_val = -np.inf
    best = None  # (feature, threshold, L) or None for the constant leaf
    count = 0
    for j in range(p):
        order = np.argsort(X[:, j], kind="stable")
        v = X[order, j]
        prefix = np.cumsum(r[order])
        bnd = np.flatnonzero(v[:-1] < v[1:])
        if min_leaf > 0:
            # boundary i leaves i + 1 units left and n - i - 1 right
            bnd = bnd[(bnd + 1 >= min_leaf) & (n - bnd - 1 >= min_leaf)]
            left_sums = prefix[bnd]
            thresholds = (v[bnd] + v[bnd + 1]) / 2.0
        else:
            left_sums = np.concatenate([prefix[bnd], [total]])
            thresholds = np.concatenate([(v[bnd] + v[bnd + 1]) / 2.0, [v[-1]]])
        if left_sums.shape[0] == 0:
            continue
        values = np.abs(left_sums) + np.abs(total - left_sums)
        count += values.shape[0]
        i = int(np.argmax(values))  # first maximum: lowest threshold wins
        if values[i] > best_val:
            best_val = float(values[i])
            degenerate = min_leaf == 0 and i == values.shape[0] - 1
            best = None if degenerate else (j, float(thresholds[i]), float(left_sums[i]))
    if p == 0 or best is None:
        return abs(total), _leaf(total), count
    j, threshold, left_sum = best
    node = TreeNode(
        feature=j, threshold=threshold,
        left=_leaf(left_sum), right=_leaf(total - left_sum),
    )
    return best_val, node, count


def _preprocess(X: np.ndarray, r: np.ndarray):
    n, p = X.shape
    orders = np.empty((p, n), dtype=np.int64)
    grp_sorted = np.empty((p, n), dtype=np.int64)
    grp_of_unit = np.empty((p, n), dtype=np.int64)
    n_groups = np.empty(p, dtype=np.int64)
    for j in range(p):
        order = np.argsort(X[:, j], kind="stable")
        v = X[order, j]
        grp = np.empty(n, dtype=np.int64)
        grp[0] = 0
        np.cumsum(v[1:] != v[:-1], out=grp[1:])
        orders[j] = order
        grp_sorted[j] = grp
        grp_of_unit[j, order] = grp
        n_groups[j] = grp[-1] + 1
    return orders, grp_sorted, grp_of_unit, n_groups


@njit(cache=True, inline="always")
def _seg_add(tot, mxp, mnp, size, pos, val):
    i = size + pos
    tot[i] += val
    mxp[i] = tot[i]
    mnp[i] = tot[i]
    i >>= 1
    while i >= 1:
        left = 2 * i
        right = left + 1
        tot[i] = tot[left] + tot[right]
        mxp[i] = max(mxp[left], tot[left] + mxp[right])
        mnp[i] = min(mnp[left], tot[left] + mnp[right])
        i >>= 1


@njit(cache=True)
def _best_single_split_value(tot, mxp, mnp, p, total):
    best = abs(total)
    for f1 in range(p):
        v = 2.0 * mxp[f1, 1] - total
        if v > best:
            best = v
        v = total - 2.0 * mnp[f1, 1]
        if v > best:
            best = v
    return best


@njit(cache=True)
def _depth2_kernel(orders, grp_sorted, grp_of_unit, n_groups, r):
    """Best depth-2 tree value; returns (value, root feature, root group, count).

    Root group g means the root splits after group g of the root feature's
    sorted order; g == n_groups - 1 is the degenerate all-left root.
    """
    p, n = orders.shape
    gmax = 1
    for j in range(p):
        if n_groups[j] > gmax:
            gmax = n_groups[j]
    size = 1
    while size < gmax:
        size *= 2
    tot = np.zeros((p, 2 * size))
    mxp = np.zeros((p, 2 * size))
    mnp = np.zeros((p, 2 * size))
    left_best = np.empty(n)
    right_best = np.empty(n)
    best_val = -np.inf
    best_f0 = -1
    best_g = -1
    count = 0
    for f0 in range(p):
        n_grp = n_groups[f0]
        # forward sweep: best depth-1 value on each prefix of f0 groups
        tot[:, :] = 0.0
        mxp[:, :] = 0.0
        mnp[:, :] = 0.0
        total = 0.0
        pos = 0
        for g in range(n_grp):
            while pos < n and grp_sorted[f0, pos] == g:
                u = orders[f0, pos]
                val = r[u]
                total += val
                for f1 in range(p):
                    _seg_add(tot[f1], mxp[f1], mnp[f1], size, grp_of_unit[f1, u], val)
                pos += 1
            left_best[g] = _best_single_split_value(tot, mxp, mnp, p, total)
        # backward sweep: best depth-1 value on each suffix
        tot[:, :] = 0.0
        mxp[:, :] = 0.0
        mnp[:, :] = 0.0
        total = 0.0
        right_best[n_grp - 1] = 0.0
        pos = n - 1
        for g in range(n_grp - 1, 0, -1):
            while pos >= 0 and grp_sorted[f0, pos] == g:
                u = orders[f0, pos]
                val = r[u]
                total += val
                for f1 in range(p):
                    _seg_add(tot[f1], mxp[f1], mnp[f1], size, grp_of_unit[f1, u], val)
                pos -= 1
            right_best[g - 1] = _best_single_split_value(tot, mxp, mnp, p, total)
        count += n_grp * (2 * p + 1)
        for g in range(n_grp):
            v = left_best[g] + right_best[g]
            if v > best_val:
                best_val = v
                best_f0 = f0
                best_g = g
    return best_val, best_f0, best_g, count


def _root_threshold(X, orders, grp_sorted, f0, g):
    pos_end = int(np.searchsorted(grp_sorted[f0], g, side="right")) - 1
    v_left = X[orders[f0, pos_end], f0]
    v_right = X[orders[f0, pos_end + 1], f0]
    return float((v_left + v_right) / 2.0)


def _solve_depth2(X: np.ndarray, r: np.ndarray):
    n = r.shape[0]
    if n == 0:
        return 0.0, TreeNode(action=-1), 0
    if X.shape[1] == 0:
        total = float(np.sum(r))
        return abs(total), _leaf(total), 0
    orders, grp_sorted, grp_of_unit, n_groups = _preprocess(X, r)
    value, f0, g, count = _depth2_kernel(orders, grp_sorted, grp_of_unit, n_groups, r)
    if g == n_groups[f0] - 1:
        # degenerate root: the optimum is a depth-<=1 tree over everything
        _, node, c1 = solve_depth1(X, r)
        return value, node, count + c1
    threshold = _root_threshold(X, orders, grp_sorted, f0, g)
    go_left = X[:, f0] <= threshold
    _, node_l, c1 = solve_depth1(X[go_left], r[go_left])
    _, node_r, c2 = solve_depth1(X[~go_left], r[~go_left])
    node = TreeNode(feature=int(f0), threshold=threshold, left=node_l, right=node_r)
    return value, node, count + c1 + c2


def _depth2_value(X: np.ndarray, r: np.ndarray):
    if r.shape[0] == 0:
        return 0.0, 0
    if X.shape[1] == 0:
        return abs(float(np.sum(r))), 0
    pre = _preprocess(X, r)
    value, _, _, count = _depth2_kernel(*pre, r)
    return value, count


def _solve_depth3(X: np.ndarray, r: np.ndarray):
    """Depth-3 optimum: exhaustive root candidates over fast depth-2 sides.

    Quadratic in N per root feature; intended for moderate sample sizes.
    """
    if r.shape[0] == 0 or X.shape[1] == 0:
        return _solve_depth2(X, r)
    degenerate_val, count = _depth2_value(X, r)
    best_val = -np.inf
    best_split = None  # None marks the degenerate root (depth-2 tree on all units)
    p = X.shape[1]
    for j in range(p):
        order = np.argsort(X[:, j], kind="stable")
        v = X[order, j]
        bnd = np.flatnonzero(v[:-1] < v[1:])
        for i in bnd:
            threshold = float((v[i] + v[i + 1]) / 2.0)
            go_left = X[:, j] <= threshold
            val_l, c_l = _depth2_value(X[go_left], r[go_left])
            val_r, c_r = _depth2_value(X[~go_left], r[~go_left])
            count += c_l + c_r + 1
            if val_l + val_r > best_val:
                best_val = val_l + val_r
                best_split = (j, threshold)
        count += 1
        if degenerate_val > best_val:
            best_val = degenerate_val
            best_split = None
    if best_split is None:
        _, node, _ = _solve_depth2(X, r)
        return best_val, node, count
    j, threshold = best_split
    go_left = X[:, j] <= threshold
    _, node_l, _ = _solve_depth2(X[go_left], r[go_left])
    _, node_r, _ = _solve_depth2(X[~go_left], r[~go_left])
    node = TreeNode(feature=j, threshold=threshold, left=node_l, right=node_r)
    return best_val, node, count


def solve_exact(X: np.ndarray, r: np.ndarray, depth: int):
    """Globally optimal tree of the given depth; returns (raw value, node, count)."""
    if depth == 1:
        return solve_depth1(X, r)
    if depth == 2:
        return _solve_depth2(X, r)
    if depth == 3:
        return _solve_depth3(X, r)
    raise ValueError(f"unsupported exact-search depth {depth}")
