"""Input validation helpers used by every estimator entry point."""

from __future__ import annotations

import numpy as np

from .exceptions import ValidationError


def check_feature_matrix(X, *, name: str = "X") -> np.ndarray:
    """Coerce ``X`` to a 2-D float64 array of finite values."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ValidationError(f"{name} must be 2-dimensional, got ndim={X.ndim}")
    if X.size and not np.all(np.isfinite(X)):
        raise ValidationError(f"{name} contains non-finite values")
    return X


def check_vector(v, *, name: str = "values", n: int | None = None) -> np.ndarray:
    """Coerce ``v`` to a 1-D float64 array of finite values of length ``n``."""
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.size and not np.all(np.isfinite(v)):
        raise ValidationError(f"{name} contains non-finite values")
    if n is not None and v.shape[0] != n:
        raise ValidationError(f"{name} has length {v.shape[0]}, expected {n}")
    return v


def check_actions(a, *, name: str = "assignments", n: int | None = None) -> np.ndarray:
    """Validate an action vector with entries in {-1, +1}."""
    a = np.asarray(a)
    if a.ndim != 1:
        raise ValidationError(f"{name} must be 1-dimensional")
    if n is not None and a.shape[0] != n:
        raise ValidationError(f"{name} has length {a.shape[0]}, expected {n}")
    a = a.astype(np.int64, copy=False)
    bad = ~np.isin(a, (-1, 1))
    if np.any(bad):
        raise ValidationError(
            f"{name} must take values in {{-1, +1}}; "
            f"first offender at position {int(np.argmax(bad))}"
        )
    return a


def check_aligned(n: int, **arrays) -> None:
    """Raise unless every named array has first dimension ``n``."""
    for name, arr in arrays.items():
        if np.asarray(arr).shape[0] != n:
            raise ValidationError(
                f"{name} has length {np.asarray(arr).shape[0]}, expected {n}"
            )
