"""Descriptive treatment-effect heterogeneity diagnostics.

``sorted_effects`` fits the fully interacted linear model

    y ~ 1 + x + treated + treated * x

reads each unit's effect off the treated block, sorts the effects, and
reports their percentiles with a uniform 95% confidence band from a
Gaussian-multiplier bootstrap of the OLS influence representation
(sup-t critical value over the percentile grid, per-point studentized).

``blp_test`` regresses the per-unit scores on a cross-fitted, demeaned
effect proxy from the same interacted model: the intercept estimates the
average effect and the slope is the heterogeneity loading, which is near
one when the proxy tracks the true effect heterogeneity and zero when
there is none.  One-sided p-values test against non-positivity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np

from ._lm import hc1_covariance, ols
from .dataset import Dataset, split_folds
from .exceptions import ValidationError
from .nuisance import NuisanceSpec
from .scores import build_scores

__all__ = [
    "SortedEffectsCurve",
    "BlpTestReport",
    "ExtremeGroupSummary",
    "sorted_effects",
    "blp_test",
    "extreme_group_summary",
]

_NORMAL = NormalDist()


@dataclass
class SortedEffectsCurve:
    """Percentiles of estimated per-unit effects with a uniform 95% band."""

    grid: np.ndarray
    estimate: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    replications: int
    critical_value: float

    def covers(self, value: float) -> bool:
        return bool(np.all((self.lower <= value) & (value <= self.upper)))

    def to_csv_rows(self):
        yield ("percentile", "estimate", "lo", "hi")
        for q, e, lo, hi in zip(self.grid, self.estimate, self.lower, self.upper):
            yield (str(int(q)), repr(float(e)), repr(float(lo)), repr(float(hi)))


def _interacted_design(dataset: Dataset, outcome: str):
    x = dataset.x
    treated = (dataset.d == 1).astype(float)
    design = np.column_stack([np.ones(dataset.n), x, treated, treated[:, None] * x])
    names = (["intercept"] + list(dataset.schema.feature_names) + ["treated"]
             + [f"treated*{f}" for f in dataset.schema.feature_names])
    return design, names, dataset.outcome(outcome)


def _effect_block(x: np.ndarray) -> np.ndarray:
    # derivative of the per-unit effect with respect to the coefficients:
    # zero on the baseline block, [1, x] on the treated block
    n, p = x.shape
    return np.column_stack([np.zeros((n, 1 + p)), np.ones(n), x])


def sorted_effects(
    dataset: Dataset,
    outcome: str = "y",
    grid=None,
    reps: int = 500,
    seed: int = 0,
) -> SortedEffectsCurve:
    """Sorted per-unit effect percentiles with a multiplier-bootstrap band.

    Each replication perturbs the OLS influence contributions with i.i.d.
    standard-normal multipliers (one derived seed per replication, so the
    result does not depend on execution order), recomputes every unit's
    effect, and re-sorts.  Sorting biases extreme percentiles outward, so
    the reported curve is the bootstrap bias-corrected curve, re-sorted to
    keep it monotone.  The band is curve +- crit * sd_q with the sup-t
    critical value crit taken at the 95th percentile of the studentized
    sup deviations.
    """
    if reps < 100:
        raise ValidationError("need at least 100 bootstrap replications")
    grid = np.arange(5, 96) if grid is None else np.asarray(list(grid), dtype=float)
    design, names, y = _interacted_design(dataset, outcome)
    beta, resid = ols(design, y, names)
    effect_design = _effect_block(dataset.x)
    effects = effect_design @ beta
    raw = np.percentile(effects, grid)

    n = dataset.n
    q_inv = np.linalg.inv(design.T @ design / n)
    influence = (design * resid[:, None]) @ q_inv.T  # row i: psi_i for beta

    curves = np.empty((reps, grid.shape[0]))
    for rep in range(reps):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(rep,)))
        g = rng.standard_normal(n)
        beta_star = beta + influence.T @ g / n
        curves[rep] = np.percentile(effect_design @ beta_star, grid)

    sd = np.std(curves, ddof=1, axis=0)
    # grid points whose bootstrap spread is pure float residue are treated
    # as degenerate (noise-free fit): their band collapses to the point
    live = sd > 1e-10 * max(1.0, float(np.max(np.abs(raw))))
    if np.any(live):
        sup_t = np.max(
            np.abs(curves[:, live] - raw[live]) / sd[live], axis=1
        )
        crit = float(np.percentile(sup_t, 95))
    else:
        crit = 0.0
        sd = np.zeros_like(sd)
    estimate = np.sort(2.0 * raw - curves.mean(axis=0))  # bias-corrected, re-sorted
    return SortedEffectsCurve(
        grid=grid,
        estimate=estimate,
        lower=estimate - crit * sd,
        upper=estimate + crit * sd,
        replications=reps,
        critical_value=crit,
    )


@dataclass
class BlpTestReport:
    """Average effect and heterogeneity loading with one-sided p-values."""

    average_effect: float
    average_effect_se: float
    average_effect_p: float
    loading: float | None
    loading_se: float | None
    loading_p: float | None
    loading_defined: bool = True

    def to_dict(self) -> dict:
        return {
            "average_effect": {
                "estimate": self.average_effect,
                "se": self.average_effect_se,
                "p_one_sided": self.average_effect_p,
            },
            "heterogeneity_loading": None if not self.loading_defined else {
                "estimate": self.loading,
                "se": self.loading_se,
                "p_one_sided": self.loading_p,
            },
            "loading_defined": self.loading_defined,
        }


def _one_sided_p(estimate: float, se: float) -> float:
    """p-value against H0: parameter is not positive."""
    if se == 0.0:
        return 0.0 if estimate > 0 else 1.0
    return 1.0 - _NORMAL.cdf(estimate / se)


def cross_fitted_effect_proxy(dataset: Dataset, outcome: str, k: int, seed: int) -> np.ndarray:
    """Out-of-fold per-unit effect predictions from the interacted model."""
    folds = split_folds(dataset.n, k, seed)
    proxy = np.empty(dataset.n)
    for fold in range(k):
        held = np.flatnonzero(folds == fold)
        train = np.flatnonzero(folds != fold)
        train_ds = dataset.subset(train)
        design, names, y = _interacted_design(train_ds, outcome)
        beta, _ = ols(design, y, names)
        proxy[held] = _effect_block(dataset.x[held]) @ beta
    return proxy


def blp_test(dataset: Dataset, outcome: str = "y", k: int = 10, seed: int = 0,
             nuisance: NuisanceSpec | None = None) -> BlpTestReport:
    """Best-linear-predictor heterogeneity test on cross-fitted proxies.

    Regresses the per-unit scores on {1, proxy - mean(proxy)} with HC1
    standard errors.  The intercept row reproduces the score-mean average
    effect; a positive, significant slope indicates detectable effect
    heterogeneity along the proxy.
    """
    spec = nuisance or NuisanceSpec(crossfit_k=k, crossfit_seed=seed)
    scores = build_scores(dataset, spec, outcome=outcome)
    proxy = cross_fitted_effect_proxy(dataset, outcome, k, seed)
    centered = proxy - np.mean(proxy)
    if np.allclose(centered, 0.0):
        gamma = scores.gamma
        n = dataset.n
        se = float(np.std(gamma, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        avg = float(np.mean(gamma))
        return BlpTestReport(
            average_effect=avg, average_effect_se=se,
            average_effect_p=_one_sided_p(avg, se),
            loading=None, loading_se=None, loading_p=None, loading_defined=False,
        )
    X = np.column_stack([np.ones(dataset.n), centered])
    beta, resid = ols(X, scores.gamma, ["intercept", "proxy"])
    cov = hc1_covariance(X, resid)
    avg, load = float(beta[0]), float(beta[1])
    avg_se, load_se = float(np.sqrt(cov[0, 0])), float(np.sqrt(cov[1, 1]))
    return BlpTestReport(
        average_effect=avg, average_effect_se=avg_se,
        average_effect_p=_one_sided_p(avg, avg_se),
        loading=load, loading_se=load_se, loading_p=_one_sided_p(load, load_se),
        loading_defined=True,
    )


@dataclass
class ExtremeGroupSummary:
    """Mean characteristics of the strongest- and weakest-effect tails.

    Per-feature standard errors only; no family-wise correction is applied
    and ``joint_inference`` stays False to flag that.
    """

    tail_fraction: float
    group_size: int
    feature_names: tuple[str, ...]
    top_means: np.ndarray
    bottom_means: np.ndarray
    differences: np.ndarray
    difference_ses: np.ndarray
    joint_inference: bool = field(default=False, init=False)

    def to_dict(self) -> dict:
        return {
            "tail_fraction": self.tail_fraction,
            "group_size": self.group_size,
            "joint_inference": self.joint_inference,
            "features": [
                {
                    "feature": f,
                    "top_mean": float(t),
                    "bottom_mean": float(b),
                    "difference": float(d),
                    "difference_se": float(s),
                }
                for f, t, b, d, s in zip(
                    self.feature_names, self.top_means, self.bottom_means,
                    self.differences, self.difference_ses,
                )
            ],
        }


def extreme_group_summary(dataset: Dataset, outcome: str = "y",
                          q: float = 0.1) -> ExtremeGroupSummary:
    """Feature means for the top-q and bottom-q effect groups."""
    if not 0.0 < q < 0.5:
        raise ValidationError("tail fraction q must lie in (0, 0.5)")
    design, names, y = _interacted_design(dataset, outcome)
    beta, _ = ols(design, y, names)
    effects = _effect_block(dataset.x) @ beta
    m = max(1, int(np.floor(q * dataset.n)))
    order = np.argsort(effects, kind="stable")
    bottom = dataset.x[order[:m]]
    top = dataset.x[order[-m:]]
    var_top = np.var(top, axis=0, ddof=1) if m > 1 else np.zeros(top.shape[1])
    var_bot = np.var(bottom, axis=0, ddof=1) if m > 1 else np.zeros(bottom.shape[1])
    return ExtremeGroupSummary(
        tail_fraction=q,
        group_size=m,
        feature_names=dataset.schema.feature_names,
        top_means=top.mean(axis=0),
        bottom_means=bottom.mean(axis=0),
        differences=top.mean(axis=0) - bottom.mean(axis=0),
        difference_ses=np.sqrt(var_top / m + var_bot / m),
    )
