"""Depth-bounded axis-aligned decision trees over the action set {-1, +1}.

Routing is fixed: ``x[feature] <= threshold`` goes left, else right.  A
constant rule is a depth-0 tree consisting of a single leaf, so learned
rules and the all-treat / no-treat benchmarks share one evaluation path.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError
from .validation import check_feature_matrix

__all__ = ["TreeNode", "PolicyTree"]


@dataclass(frozen=True)
class TreeNode:
    """Internal node (feature, threshold, children) or leaf (action)."""

    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    action: int | None = None

    @property
    def is_leaf(self) -> bool:
        return self.action is not None

    def __post_init__(self):
        if self.is_leaf:
            if self.action not in (-1, 1):
                raise ValidationError("leaf action must be -1 or +1")
            if self.feature is not None or self.left is not None or self.right is not None:
                raise ValidationError("leaf nodes carry only an action")
        else:
            if self.feature is None or self.threshold is None:
                raise ValidationError("internal nodes need a feature and threshold")
            if not math.isfinite(self.threshold):
                raise ValidationError("thresholds must be finite reals")
            if self.left is None or self.right is None:
                raise ValidationError("internal nodes need two children")

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())

    def simplify(self) -> "TreeNode":
        """Collapse splits whose two sides act identically."""
        if self.is_leaf:
            return self
        left = self.left.simplify()
        right = self.right.simplify()
        if left.is_leaf and right.is_leaf and left.action == right.action:
            return TreeNode(action=left.action)
        return TreeNode(feature=self.feature, threshold=self.threshold,
                        left=left, right=right)


class PolicyTree:
    """A fitted targeting rule: deterministic map from features to actions."""

    def __init__(self, root: TreeNode, max_depth: int,
                 feature_names: tuple[str, ...] | None = None):
        self.root = root.simplify()
        self.max_depth = int(max_depth)
        self.feature_names = tuple(feature_names) if feature_names is not None else None
        if self.root.depth() > self.max_depth:
            raise ValidationError(
                f"tree depth {self.root.depth()} exceeds declared {self.max_depth}"
            )

    @classmethod
    def constant(cls, action: int, feature_names=None) -> "PolicyTree":
        return cls(TreeNode(action=action), max_depth=0, feature_names=feature_names)

    @property
    def n_features_expected(self) -> int | None:
        return len(self.feature_names) if self.feature_names is not None else None

    def depth(self) -> int:
        return self.root.depth()

    def predict(self, X) -> np.ndarray:
        """Actions in {-1, +1}, one per row of ``X``."""
        X = check_feature_matrix(X)
        expected = self.n_features_expected
        if expected is not None and X.shape[1] != expected:
            raise ValidationError(
                f"X has {X.shape[1]} features, rule was trained on {expected}"
            )
        out = np.empty(X.shape[0], dtype=np.int64)
        self._route(self.root, X, np.arange(X.shape[0]), out)
        return out

    def _route(self, node: TreeNode, X, rows, out) -> None:
        if node.is_leaf:
            out[rows] = node.action
            return
        go_left = X[rows, node.feature] <= node.threshold
        self._route(node.left, X, rows[go_left], out)
        self._route(node.right, X, rows[~go_left], out)

    def assignments_share(self, X) -> float:
        return float(np.mean(self.predict(X) == 1))

    # -- JSON round-trip (thresholds serialized decimal-exactly) ----------

    def _node_to_obj(self, node: TreeNode):
        if node.is_leaf:
            return {"feature": None, "threshold": None, "left": None,
                    "right": None, "action": int(node.action)}
        name = (self.feature_names[node.feature]
                if self.feature_names is not None else str(node.feature))
        return {
            "feature": name,
            # json emits the shortest decimal that round-trips binary64,
            # so thresholds reload bit-exactly
            "threshold": float(node.threshold),
            "left": self._node_to_obj(node.left),
            "right": self._node_to_obj(node.right),
            "action": None,
        }

    def to_json(self) -> str:
        return json.dumps(self._node_to_obj(self.root), indent=2)

    @classmethod
    def from_json(cls, text: str, max_depth: int | None = None,
                  feature_names: tuple[str, ...] | None = None) -> "PolicyTree":
        obj = json.loads(text)
        pinned = feature_names is not None
        names: list[str] = list(feature_names) if pinned else []

        def build(node_obj) -> TreeNode:
            if node_obj["action"] is not None:
                return TreeNode(action=int(node_obj["action"]))
            name = node_obj["feature"]
            if name not in names:
                if pinned:
                    raise ValidationError(
                        f"tree references feature {name!r} absent from schema {names}"
                    )
                names.append(name)
            return TreeNode(
                feature=names.index(name),
                threshold=float(node_obj["threshold"]),
                left=build(node_obj["left"]),
                right=build(node_obj["right"]),
            )

        root = build(obj)
        depth = root.depth() if max_depth is None else max_depth
        return cls(root, max_depth=depth, feature_names=tuple(names) or None)

    def __repr__(self):
        return f"PolicyTree(depth={self.depth()}, max_depth={self.max_depth})"

    def describe(self, indent: str = "") -> str:
        """Human-readable rendering of the rule."""
        lines: list[str] = []

        def walk(node, pad):
            if node.is_leaf:
                lines.append(f"{pad}action {node.action:+d}")
                return
            name = (self.feature_names[node.feature]
                    if self.feature_names is not None else f"x[{node.feature}]")
            lines.append(f"{pad}if {name} <= {node.threshold:g}:")
            walk(node.left, pad + "  ")
            lines.append(f"{pad}else:")
            walk(node.right, pad + "  ")

        walk(self.root, indent)
        return "\n".join(lines)
