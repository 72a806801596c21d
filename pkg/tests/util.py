"""Small builders shared across test modules."""

from __future__ import annotations

import numpy as np

from targetlearn import Dataset, Schema


def make_dataset(y, d, z=None, x=None, cards=None, cost=0.0, extra=None) -> Dataset:
    """Assemble a dataset from plain arrays with an inferred schema."""
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    d = np.asarray(d)
    z = np.zeros((n, 0), dtype=int) if z is None else np.asarray(z).reshape(n, -1)
    x = np.zeros((n, 0), dtype=float) if x is None else np.asarray(x, dtype=float).reshape(n, -1)
    if cards is None:
        cards = tuple(int(z[:, j].max()) + 1 for j in range(z.shape[1]))
    extra = extra or {}
    schema = Schema(
        feature_names=tuple(f"x_{j + 1}" for j in range(x.shape[1])),
        stratum_names=tuple(f"z_{j + 1}" for j in range(z.shape[1])),
        stratum_cards=tuple(cards),
        extra_outcome_names=tuple(extra),
    )
    return Dataset(
        schema=schema,
        ids=tuple(f"u{i}" for i in range(n)),
        y=y, d=d, z=z, x=x,
        extra_outcomes={k: np.asarray(v, dtype=float) for k, v in extra.items()},
        cost=cost,
    )
