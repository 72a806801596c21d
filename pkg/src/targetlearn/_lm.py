"""Least-squares and logit internals shared by the estimation modules.

These are deliberately small: dense designs with at most a few dozen
columns, solved by QR, with rank problems surfaced as errors that name the
offending columns instead of being silently regularized away.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .exceptions import NumericalError

_RCOND = 1e-9


def collinear_columns(X: np.ndarray, names: list[str] | None = None) -> list[str]:
    """Names (or indices) of columns dropped by a rank-revealing QR."""
    if X.shape[1] == 0:
        return []
    _, r, piv = scipy.linalg.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = diag.max(initial=0.0) * max(X.shape) * np.finfo(float).eps
    rank = int(np.sum(diag > tol))
    dropped = sorted(piv[rank:])
    if names is None:
        return [str(j) for j in dropped]
    return [names[j] for j in dropped]


def ols(X: np.ndarray, y: np.ndarray, names: list[str] | None = None):
    """OLS fit with a rank check.

    Returns ``(beta, residuals)``; raises :class:`NumericalError` listing
    the collinear columns when the design is rank deficient.
    """
    n, k = X.shape
    beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=_RCOND)
    if rank < k:
        raise NumericalError(
            f"rank-deficient design (rank {rank} < {k} columns); "
            f"collinear columns: {collinear_columns(X, names)}"
        )
    return beta, y - X @ beta


def hc1_covariance(X: np.ndarray, residuals: np.ndarray) -> np.ndarray:
    """Heteroskedasticity-robust (HC1) covariance of the OLS coefficients."""
    n, k = X.shape
    xtx_inv = np.linalg.inv(X.T @ X)
    meat = (X * residuals[:, None] ** 2).T @ X
    return xtx_inv @ meat @ xtx_inv * (n / max(n - k, 1))


def _sigmoid(eta: np.ndarray) -> np.ndarray:
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    expi = np.exp(eta[~pos])
    out[~pos] = expi / (1.0 + expi)
    return out


def _log_likelihood(y01, p, w):
    eps = 1e-300
    return float(np.sum(w * (y01 * np.log(p + eps) + (1 - y01) * np.log(1 - p + eps))))


def logit_irls(
    X: np.ndarray,
    y01: np.ndarray,
    weights: np.ndarray | None = None,
    *,
    max_iter: int = 100,
    grad_tol: float = 1e-8,
    ll_tol: float = 1e-10,
    raise_on_failure: bool = True,
):
    """Maximum-likelihood logit by iteratively reweighted least squares.

    Newton steps with step-halving whenever a step lowers the
    log-likelihood.  Converged when the largest score-gradient entry falls
    below ``grad_tol`` or the relative log-likelihood change falls below
    ``ll_tol``.  On a singular Hessian or after ``max_iter`` iterations
    without convergence, raises :class:`NumericalError` (or, with
    ``raise_on_failure=False``, returns the last iterate flagged
    unconverged, which callers with a fallback rule can still use).
    """
    n, k = X.shape
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
    beta = np.zeros(k)
    p = _sigmoid(X @ beta)
    ll = _log_likelihood(y01, p, w)

    def fail(message):
        if raise_on_failure:
            raise NumericalError(message)
        return beta, False

    for _ in range(max_iter):
        grad = X.T @ (w * (y01 - p))
        if np.max(np.abs(grad)) < grad_tol:
            return beta, True
        wls = w * p * (1.0 - p)
        hessian = (X * wls[:, None]).T @ X
        try:
            step = np.linalg.solve(hessian, grad)
        except np.linalg.LinAlgError:
            return fail("singular Hessian in logit fit (separated or collinear design)")
        if not np.all(np.isfinite(step)):
            return fail("non-finite Newton step in logit fit")
        # step-halving: never accept a likelihood decrease
        for _ in range(40):
            candidate = beta + step
            p_new = _sigmoid(X @ candidate)
            ll_new = _log_likelihood(y01, p_new, w)
            if ll_new >= ll:
                break
            step = step / 2.0
        else:
            return fail("logit step-halving failed to improve likelihood")
        converged = abs(ll_new - ll) <= ll_tol * (abs(ll) + 1e-12)
        beta, p, ll = candidate, p_new, ll_new
        if converged:
            return beta, True
    return fail(f"logit IRLS did not converge in {max_iter} iterations")
