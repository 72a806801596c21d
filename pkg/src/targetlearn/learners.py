"""Policy learners: rules pi(x) in {-1, +1} maximizing (1/2N) sum pi(x_i) r_i.

All learners follow the scikit-learn estimator protocol: construct with
hyperparameters, ``fit(X, r)`` on per-unit net rewards r_i = score_i - cost,
then ``predict(X)`` returns actions.  After fitting, ``report_`` carries the
in-sample objective (re-evaluated on the training rewards), the number of
candidate splits examined, and the elapsed time.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ._exact_search import evaluate_objective, solve_depth1, solve_exact
from ._lm import logit_irls, _sigmoid
from .dataset import split_folds
from .exceptions import ValidationError
from .tree import PolicyTree, TreeNode
from .validation import check_feature_matrix, check_vector

__all__ = [
    "LearnerReport",
    "ExactPolicyTree",
    "GreedyPolicyTree",
    "WeightedLogitPolicy",
    "ConstantPolicy",
    "brute_force_oracle",
    "rule_to_dict",
    "rule_from_dict",
]


@dataclass
class LearnerReport:
    """Fit diagnostics: objective, candidates examined, wall time."""

    objective: float
    candidates_examined: int
    elapsed_seconds: float
    notes: str = ""


def _check_fit_inputs(X, r):
    X = check_feature_matrix(X)
    r = check_vector(r, name="rewards", n=X.shape[0])
    if X.shape[0] == 0:
        raise ValidationError("empty input: need at least one unit")
    return X, r


class _RuleMixin:
    """Shared prediction/report plumbing for fitted policy rules."""

    def predict(self, X) -> np.ndarray:
        self._check_fitted()
        return self.tree_.predict(X)

    def share_treated(self, X) -> float:
        return float(np.mean(self.predict(X) == 1))

    def _check_fitted(self):
        if not hasattr(self, "tree_"):
            raise ValidationError(f"{type(self).__name__} is not fitted")

    def _finish(self, X, r, tree, candidates, t0, notes=""):
        self.tree_ = tree
        self.objective_ = evaluate_objective(tree.predict(X), r)
        self.report_ = LearnerReport(
            objective=self.objective_,
            candidates_examined=int(candidates),
            elapsed_seconds=time.perf_counter() - t0,
            notes=notes,
        )
        return self


class ExactPolicyTree(BaseEstimator, _RuleMixin):
    """Globally optimal depth-bounded tree by exhaustive split search.

    Depth is capped at 3: the search cost grows by a factor of order
    (features x N) per level, and depth 3 is already quadratic in N.
    """

    def __init__(self, depth: int = 2):
        self.depth = depth

    def fit(self, X, r, feature_names=None):
        t0 = time.perf_counter()
        try:
            depth = int(self.depth)
        except (TypeError, ValueError):
            raise ValidationError(f"exact search depth must be an integer, "
                                  f"got {self.depth!r}") from None
        if not 1 <= depth <= 3:
            raise ValidationError("exact search depth ≤ 3 (and ≥ 1)")
        X, r = _check_fit_inputs(X, r)
        _, node, count = solve_exact(X, r, depth)
        tree = PolicyTree(node, max_depth=depth, feature_names=feature_names)
        return self._finish(X, r, tree, count, t0)


class GreedyPolicyTree(BaseEstimator, _RuleMixin):
    """Recursive top-down tree: each node takes the locally best split.

    Stops at the depth limit, when no split improves on the node acting as
    a single leaf, or when a split would create a child smaller than
    ``min_leaf_size``.  With ``depth='cv'`` the depth is chosen from
    ``cv_depths`` to maximize the out-of-fold mean of pi * r / 2 over
    ``cv_folds`` folds, then the tree is refit on all units.
    """

    def __init__(self, depth: int | str = 2, min_leaf_size: int = 10,
                 cv_folds: int = 10, cv_depths: tuple[int, ...] = (1, 2, 3, 4, 5, 6),
                 seed: int = 0):
        self.depth = depth
        self.min_leaf_size = min_leaf_size
        self.cv_folds = cv_folds
        self.cv_depths = cv_depths
        self.seed = seed

    def fit(self, X, r, feature_names=None):
        t0 = time.perf_counter()
        X, r = _check_fit_inputs(X, r)
        if self.depth == "cv":
            depth, notes = self._select_depth(X, r)
        else:
            depth = int(self.depth)
            notes = ""
            if depth < 1:
                raise ValidationError("greedy tree depth must be >= 1")
        self._count = 0
        node = self._grow(X, r, depth)
        tree = PolicyTree(node, max_depth=depth, feature_names=feature_names)
        self.selected_depth_ = depth
        return self._finish(X, r, tree, self._count, t0, notes=notes)

    def _grow(self, X, r, depth_left) -> TreeNode:
        total = float(np.sum(r))
        as_leaf = TreeNode(action=1 if total > 0 else -1)
        if depth_left == 0 or r.shape[0] < 2 * self.min_leaf_size:
            return as_leaf
        value, node, count = solve_depth1(X, r, min_leaf=self.min_leaf_size)
        self._count += count
        if node.is_leaf or value <= abs(total):
            return as_leaf  # pure-gain exhaustion: no split strictly improves
        go_left = X[:, node.feature] <= node.threshold
        return TreeNode(
            feature=node.feature, threshold=node.threshold,
            left=self._grow(X[go_left], r[go_left], depth_left - 1),
            right=self._grow(X[~go_left], r[~go_left], depth_left - 1),
        )

    def _select_depth(self, X, r):
        n = X.shape[0]
        k = min(self.cv_folds, n)
        if k < 2:
            return min(self.cv_depths), "cv skipped: too few units"
        folds = split_folds(n, k, self.seed)
        best_depth, best_gain = None, -np.inf
        for depth in sorted(self.cv_depths):
            held_gain = np.empty(n)
            for fold in range(k):
                held = folds == fold
                sub = GreedyPolicyTree(depth=depth, min_leaf_size=self.min_leaf_size)
                sub.fit(X[~held], r[~held])
                held_gain[held] = sub.predict(X[held]) * r[held] / 2.0
            gain = float(np.mean(held_gain))
            if gain > best_gain:
                best_depth, best_gain = depth, gain
        return best_depth, f"cv-selected depth {best_depth} (gain {best_gain:.4g})"


class ConstantPolicy(BaseEstimator, _RuleMixin):
    """Always treat (+1), never treat (-1), or the best constant from data."""

    def __init__(self, action: int | None = None):
        self.action = action

    def fit(self, X, r, feature_names=None):
        t0 = time.perf_counter()
        X, r = _check_fit_inputs(X, r)
        if self.action is None:
            action = 1 if float(np.sum(r)) > 0 else -1
        else:
            if self.action not in (-1, 1):
                raise ValidationError("constant action must be -1 or +1")
            action = int(self.action)
        tree = PolicyTree.constant(action, feature_names=feature_names)
        return self._finish(X, r, tree, 0, t0)


class WeightedLogitPolicy(BaseEstimator, _RuleMixin):
    """Weighted-classification rule: logit of sign(r) weighted by |r|.

    The rule treats where the predicted probability of a positive net
    reward exceeds one half.  ``spec='flexible'`` augments the design with
    squares of continuous features and all first-order interactions.
    Under separation or other solver failure the learner falls back to the
    best constant rule and sets ``fallback_``; it never raises for that.
    """

    def __init__(self, spec: str = "baseline"):
        self.spec = spec

    def fit(self, X, r, feature_names=None):
        t0 = time.perf_counter()
        if self.spec not in ("baseline", "flexible"):
            raise ValidationError("spec must be 'baseline' or 'flexible'")
        X, r = _check_fit_inputs(X, r)
        names = (list(feature_names) if feature_names is not None
                 else [f"x{j + 1}" for j in range(X.shape[1])])
        self.fallback_ = False
        self.converged_ = True
        labels = (r > 0).astype(float)
        weights = np.abs(r)

        best_constant = 1 if float(np.sum(r)) > 0 else -1
        if labels.min() == labels.max() or float(np.sum(weights)) == 0.0:
            # fewer than two reward signs: the constant rule is forced
            self._set_constant_rule(best_constant, names)
            return self._finish(X, r, self.tree_, 0, t0, notes="constant (one sign)")

        design, design_names, meta = _expand_design(X, names, self.spec)
        centered, mean, scale = _standardize(design)
        Xd = np.column_stack([np.ones(X.shape[0]), centered])
        beta, converged = logit_irls(Xd, labels, weights, raise_on_failure=False)
        self.converged_ = bool(converged)

        fitted_actions = np.where(Xd @ beta > 0.0, 1, -1)
        fitted_value = float(fitted_actions @ r)
        constant_value = abs(float(np.sum(r)))
        if not np.all(np.isfinite(beta)) or (not converged and fitted_value < constant_value):
            self._set_constant_rule(best_constant, names)
            self.fallback_ = True
            return self._finish(X, r, self.tree_, 0, t0,
                                notes="separation fallback to constant rule")

        # map standardized-space coefficients back to the raw design
        raw_coef = beta[1:] / scale
        intercept = float(beta[0] - np.sum(beta[1:] * mean / scale))
        self.intercept_ = intercept
        self.coefficients_ = dict(zip(design_names, raw_coef.tolist()))
        self._design_meta = meta
        self._feature_names = names
        self.tree_ = None
        self.objective_ = evaluate_objective(self.predict(X), r)
        self.report_ = LearnerReport(
            objective=self.objective_, candidates_examined=0,
            elapsed_seconds=time.perf_counter() - t0,
            notes="" if converged else "solver stopped early; separating rule kept",
        )
        return self

    def _set_constant_rule(self, action, names):
        self.intercept_ = None
        self.tree_ = PolicyTree.constant(action, feature_names=names)
        self.constant_action_ = action

    def _linear_score(self, X) -> np.ndarray:
        if not hasattr(self, "coefficients_"):
            raise ValidationError("WeightedLogitPolicy is not fitted")
        X = check_feature_matrix(X)
        if X.shape[1] != len(self._feature_names):
            raise ValidationError(
                f"X has {X.shape[1]} features, rule was trained on "
                f"{len(self._feature_names)}"
            )
        design, _, _ = _expand_design(X, self._feature_names, self.spec,
                                      meta=self._design_meta)
        coef = np.array([self.coefficients_[c] for c in self._design_meta["names"]])
        return self.intercept_ + design @ coef

    def predict(self, X) -> np.ndarray:
        if getattr(self, "tree_", None) is not None:
            return self.tree_.predict(X)
        return np.where(self._linear_score(X) > 0.0, 1, -1).astype(np.int64)

    def predicted_probability(self, X) -> np.ndarray:
        if getattr(self, "tree_", None) is not None:
            return np.where(self.tree_.predict(X) == 1, 1.0, 0.0)
        return _sigmoid(self._linear_score(X))


def _expand_design(X, names, spec, meta=None):
    """Raw design for the logit rule; 'flexible' adds squares and interactions."""
    p = X.shape[1]
    if spec == "baseline":
        out_names = list(names)
        return X, out_names, {"names": out_names, "continuous": []}
    if meta is None:
        continuous = [j for j in range(p) if np.unique(X[:, j]).size > 2]
    else:
        continuous = meta["continuous"]
    columns = [X]
    out_names = list(names)
    for j in continuous:
        columns.append((X[:, j] ** 2)[:, None])
        out_names.append(f"{names[j]}^2")
    for a in range(p):
        for b in range(a + 1, p):
            columns.append((X[:, a] * X[:, b])[:, None])
            out_names.append(f"{names[a]}*{names[b]}")
    design = np.column_stack(columns)
    return design, out_names, {"names": out_names, "continuous": continuous}


def _standardize(design):
    mean = design.mean(axis=0)
    scale = design.std(axis=0)
    scale[scale == 0.0] = 1.0
    return (design - mean) / scale, mean, scale


def rule_to_dict(rule) -> dict:
    """Serializable form of a fitted rule (tree, linear, or constant)."""
    if isinstance(rule, PolicyTree):
        return {"kind": "policy_tree", "max_depth": rule.max_depth,
                "feature_names": list(rule.feature_names or ()),
                "tree": json.loads(rule.to_json())}
    if isinstance(rule, WeightedLogitPolicy) and getattr(rule, "tree_", None) is None:
        return {
            "kind": "weighted_logit",
            "spec": rule.spec,
            "feature_names": list(rule._feature_names),
            "intercept": rule.intercept_,
            "coefficients": rule.coefficients_,
            "continuous": list(rule._design_meta["continuous"]),
        }
    tree = getattr(rule, "tree_", None)
    if tree is None:
        raise ValidationError(f"cannot serialize unfitted rule {type(rule).__name__}")
    return rule_to_dict(tree)


def rule_from_dict(obj: dict):
    """Rebuild a predictor (with ``predict`` and ``feature_names``) from
    :func:`rule_to_dict` output."""
    kind = obj.get("kind")
    if kind == "policy_tree":
        names = tuple(obj.get("feature_names", ())) or None
        return PolicyTree.from_json(json.dumps(obj["tree"]),
                                    max_depth=obj.get("max_depth"),
                                    feature_names=names)
    if kind == "weighted_logit":
        rule = WeightedLogitPolicy(spec=obj["spec"])
        rule._feature_names = list(obj["feature_names"])
        rule.intercept_ = float(obj["intercept"])
        rule.coefficients_ = {k: float(v) for k, v in obj["coefficients"].items()}
        names = list(rule.coefficients_)
        rule._design_meta = {"names": names,
                             "continuous": [int(j) for j in obj.get("continuous", ())]}
        rule.tree_ = None
        rule.fallback_ = False
        return rule
    raise ValidationError(f"unknown rule kind {obj.get('kind')!r}")


def brute_force_oracle(rewards, features, depth: int):
    """Exact optimum by full enumeration with no pruning; tests only.

    Every (feature, threshold, left-action, right-action) combination is
    evaluated by direct summation.  Guarded to N <= 300, up to 4 features,
    depth <= 2.
    """
    X = check_feature_matrix(features)
    r = check_vector(rewards, name="rewards", n=X.shape[0])
    n, p = X.shape
    if n == 0:
        raise ValidationError("empty input: need at least one unit")
    if n > 300 or p > 4 or not 0 <= int(depth) <= 2:
        raise ValidationError(
            "oracle size guard: N <= 300, features <= 4, depth <= 2"
        )

    def candidates(Xs, j):
        vals = np.unique(Xs[:, j])
        mids = (vals[:-1] + vals[1:]) / 2.0
        return np.concatenate([mids, vals[-1:]])

    def best_leaf(rs):
        s = float(np.sum(rs))
        value = max(s, -s)  # action +1 vs action -1
        return value, TreeNode(action=1 if s > 0 else -1)

    def best_tree(Xs, rs, depth_left):
        if rs.shape[0] == 0:
            return 0.0, TreeNode(action=-1)
        value, node = best_leaf(rs)
        if depth_left == 0:
            return value, node
        for j in range(p):
            for t in candidates(Xs, j):
                mask = Xs[:, j] <= t
                if depth_left == 1:
                    left_sum = float(np.sum(rs[mask]))
                    right_sum = float(np.sum(rs[~mask]))
                    for a_left in (1, -1):
                        for a_right in (1, -1):
                            v = a_left * left_sum + a_right * right_sum
                            if v > value:
                                value = v
                                node = TreeNode(
                                    feature=j, threshold=float(t),
                                    left=TreeNode(action=a_left),
                                    right=TreeNode(action=a_right),
                                )
                else:
                    v_left, node_left = best_tree(Xs[mask], rs[mask], depth_left - 1)
                    v_right, node_right = best_tree(Xs[~mask], rs[~mask], depth_left - 1)
                    if v_left + v_right > value:
                        value = v_left + v_right
                        node = TreeNode(feature=j, threshold=float(t),
                                        left=node_left, right=node_right)
        return value, node

    value, node = best_tree(X, r, int(depth))
    tree = PolicyTree(node, max_depth=int(depth))
    return value / (2.0 * n), tree
