"""Policy value and gain estimation, in-sample and cross-validated.

For a rule pi and per-unit scores with net reward r_i = Gamma_i - c, the
four estimators are sample means of per-unit contributions:

    value (P):            Gamma_i(pi_i) - 1{pi_i = +1} * c
    gain vs all-treat:    (pi_i - 1) / 2 * r_i
    gain vs no-treat:     (1 + pi_i) / 2 * r_i
    gain vs random half:  pi_i * r_i / 2

Each standard error is the sample standard deviation of the contribution
over sqrt(N).  The identities gain_random = (gain_all + gain_none) / 2 and
P(rule) - P(no-treat) = gain_vs_no_treat hold by construction.

The cross-validated protocol partitions the data into K folds, fits
nuisances and the learner on each complement, and evaluates the learned
rule on the held-out fold with held-out scores built from the training
nuisances, so every reported number is out-of-sample.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import clone
from statistics import NormalDist

from .dataset import Dataset, split_folds
from .exceptions import NumericalError, ValidationError
from .nuisance import NuisanceSpec, fit_outcome_means
from .scores import ScoreSet, compute_aipw
from .validation import check_actions

__all__ = [
    "EstimateWithSE",
    "ValueReport",
    "evaluate",
    "cross_validate",
    "transfer_evaluate",
    "report_table",
    "significance_stars",
]

_NORMAL = NormalDist()


@dataclass(frozen=True)
class EstimateWithSE:
    estimate: float
    se: float

    @property
    def z(self) -> float:
        if self.se == 0.0:
            return float("inf") if self.estimate != 0.0 else 0.0
        return self.estimate / self.se

    @property
    def p_two_sided(self) -> float:
        z = abs(self.z)
        if np.isinf(z):
            return 0.0
        return 2.0 * (1.0 - _NORMAL.cdf(z))


def significance_stars(estimate: float, se: float) -> str:
    """***, **, * at the 1/5/10 percent two-sided normal levels."""
    p = EstimateWithSE(estimate, se).p_two_sided
    if p < 0.01:
        return "***"
    if p < 0.05:
        return "**"
    if p < 0.10:
        return "*"
    return ""


@dataclass
class ValueReport:
    """Estimated value of a rule and its gains over the three benchmarks."""

    share_treated: float
    value: EstimateWithSE
    gain_vs_all_treat: EstimateWithSE
    gain_vs_no_treat: EstimateWithSE
    gain_vs_random: EstimateWithSE
    n: int
    outcome: str = "y"
    cost: float = 0.0
    label: str = ""
    contributions: dict[str, np.ndarray] = field(default_factory=dict, repr=False)
    folds: list["ValueReport"] = field(default_factory=list, repr=False)

    def to_dict(self, include_folds: bool = True) -> dict:
        out = {
            "label": self.label,
            "outcome": self.outcome,
            "cost": self.cost,
            "n": self.n,
            "share_treated": self.share_treated,
        }
        for key in ("value", "gain_vs_all_treat", "gain_vs_no_treat", "gain_vs_random"):
            est: EstimateWithSE = getattr(self, key)
            out[key] = {"estimate": est.estimate, "se": est.se,
                        "stars": significance_stars(est.estimate, est.se)}
        if include_folds and self.folds:
            out["folds"] = [f.to_dict(include_folds=False) for f in self.folds]
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "ValueReport":
        def est(key):
            return EstimateWithSE(obj[key]["estimate"], obj[key]["se"])

        return cls(
            share_treated=obj["share_treated"],
            value=est("value"),
            gain_vs_all_treat=est("gain_vs_all_treat"),
            gain_vs_no_treat=est("gain_vs_no_treat"),
            gain_vs_random=est("gain_vs_random"),
            n=obj["n"],
            outcome=obj.get("outcome", "y"),
            cost=obj.get("cost", 0.0),
            label=obj.get("label", ""),
            folds=[cls.from_dict(f) for f in obj.get("folds", [])],
        )


def _estimate(contrib: np.ndarray) -> EstimateWithSE:
    n = contrib.shape[0]
    se = float(np.std(contrib, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return EstimateWithSE(float(np.mean(contrib)), se)


def _contributions(scores: ScoreSet, actions: np.ndarray, cost: float):
    treated = actions == 1
    gamma_pi = np.where(treated, scores.gamma1, scores.gamma_neg1)
    net = scores.gamma - cost
    return {
        "value": gamma_pi - np.where(treated, cost, 0.0),
        "gain_vs_all_treat": (actions - 1) / 2.0 * net,
        "gain_vs_no_treat": (1 + actions) / 2.0 * net,
        "gain_vs_random": actions * net / 2.0,
    }


def evaluate(scores: ScoreSet, assignments, cost: float | None = None,
             label: str = "", outcome: str | None = None) -> ValueReport:
    """Estimate the value and benchmark gains of fixed per-unit actions."""
    actions = check_actions(assignments, n=scores.n)
    c = scores.cost if cost is None else float(cost)
    contrib = _contributions(scores, actions, c)
    return ValueReport(
        share_treated=float(np.mean(actions == 1)),
        value=_estimate(contrib["value"]),
        gain_vs_all_treat=_estimate(contrib["gain_vs_all_treat"]),
        gain_vs_no_treat=_estimate(contrib["gain_vs_no_treat"]),
        gain_vs_random=_estimate(contrib["gain_vs_random"]),
        n=scores.n,
        outcome=outcome if outcome is not None else scores.outcome,
        cost=c,
        label=label,
        contributions=contrib,
    )


def _fit_fold(dataset, learner, outcome, cost, spec, folds, fold, feature_cols,
              feature_names):
    """One cross-validation fold: fit on complement, score the held-out."""
    held_idx = np.flatnonzero(folds == fold)
    train_idx = np.flatnonzero(folds != fold)
    try:
        train = dataset.subset(train_idx)
        held = dataset.subset(held_idx, allow_single_arm=True)
        prop = spec.fit_propensity(train)
        outm = fit_outcome_means(train, spec.design, outcome)

        mu1_train, mu0_train = outm.predict(train)
        train_scores = compute_aipw(
            train, prop.predict(train), mu1_train, mu0_train,
            outcome=outcome, cost=cost, provenance=f"fold{fold}-train",
        )
        rule = clone(learner)
        rule.fit(train.x[:, feature_cols], train_scores.net_reward,
                 feature_names=feature_names)

        mu1_held, mu0_held = outm.predict(held)
        held_scores = compute_aipw(
            held, prop.predict(held), mu1_held, mu0_held,
            outcome=outcome, cost=cost, provenance=f"fold{fold}-heldout",
        )
        actions = rule.predict(held.x[:, feature_cols])
    except (ValidationError, NumericalError) as err:
        raise type(err)(f"fold {fold}: {err}") from err
    report = evaluate(held_scores, actions, cost=cost, label=f"fold {fold}")
    return held_idx, actions, report


def cross_validate(
    dataset: Dataset,
    learner,
    outcome: str = "y",
    k: int = 20,
    seed: int = 0,
    cost: float | None = None,
    nuisance: NuisanceSpec | None = None,
    threads: int = 1,
    label: str = "",
    features: list[str] | None = None,
) -> ValueReport:
    """K-fold out-of-sample evaluation of a policy learner.

    Reported estimates are the averages of the per-fold estimates; the
    standard errors pool the per-unit contributions across all held-out
    units (each unit is held out exactly once).  Per-fold reports are kept
    in ``folds`` so either aggregation can be recomputed.

    ``features`` restricts the learner to the named columns (scores are
    unaffected), which is how rules built on covariate subsets are
    compared against the full-data rule.
    """
    spec = nuisance or NuisanceSpec()
    c = dataset.cost if cost is None else float(cost)
    folds = split_folds(dataset.n, k, seed)
    if features is not None:
        feature_names = tuple(features)
        feature_cols = dataset.feature_index(feature_names)
    else:
        feature_names = dataset.schema.feature_names
        feature_cols = np.arange(dataset.x.shape[1])

    def run(fold):
        return _fit_fold(dataset, learner, outcome, c, spec, folds, fold,
                         feature_cols, feature_names)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, range(k)))
    else:
        results = [run(fold) for fold in range(k)]

    pooled = {key: np.empty(dataset.n) for key in
              ("value", "gain_vs_all_treat", "gain_vs_no_treat", "gain_vs_random")}
    all_actions = np.empty(dataset.n, dtype=np.int64)
    fold_reports = []
    for held_idx, actions, report in results:
        all_actions[held_idx] = actions
        for key in pooled:
            pooled[key][held_idx] = report.contributions[key]
        fold_reports.append(report)

    def combine(key) -> EstimateWithSE:
        fold_mean = float(np.mean([getattr(rep, key).estimate for rep in fold_reports]))
        pooled_se = float(np.std(pooled[key], ddof=1) / np.sqrt(dataset.n))
        return EstimateWithSE(fold_mean, pooled_se)

    return ValueReport(
        share_treated=float(np.mean(all_actions == 1)),
        value=combine("value"),
        gain_vs_all_treat=combine("gain_vs_all_treat"),
        gain_vs_no_treat=combine("gain_vs_no_treat"),
        gain_vs_random=combine("gain_vs_random"),
        n=dataset.n,
        outcome=outcome,
        cost=c,
        label=label or f"cross-validated (k={k}, seed={seed})",
        contributions=pooled,
        folds=fold_reports,
    )


def transfer_evaluate(
    rule,
    dataset: Dataset,
    outcome: str = "y",
    cost: float | None = None,
    nuisance: NuisanceSpec | None = None,
    label: str = "",
) -> ValueReport:
    """Evaluate a frozen rule on a new sample; nothing is refit but nuisances.

    The new sample's own nuisances back its scores; the rule's features are
    looked up by name, so the new schema must contain them.
    """
    spec = nuisance or NuisanceSpec()
    c = dataset.cost if cost is None else float(cost)
    feature_names = getattr(rule, "feature_names", None)
    if feature_names is None:
        tree = getattr(rule, "tree_", None)
        feature_names = tree.feature_names if tree is not None else None
        if feature_names is None and hasattr(rule, "_feature_names"):
            feature_names = rule._feature_names
    if feature_names is not None:
        cols = dataset.feature_index(feature_names)
        X = dataset.x[:, cols]
    else:
        X = dataset.x
    prop = spec.fit_propensity(dataset)
    outm = fit_outcome_means(dataset, spec.design, outcome)
    mu1, mu0 = outm.predict(dataset)
    scores = compute_aipw(dataset, prop.predict(dataset), mu1, mu0,
                          outcome=outcome, cost=c, provenance=spec.label())
    actions = rule.predict(X)
    return evaluate(scores, actions, cost=c, label=label or "transfer", outcome=outcome)


def report_table(reports, title: str = "") -> str:
    """Aligned text table comparing value reports.

    One block of two lines per report: estimates with significance stars,
    standard errors in parentheses beneath.
    """
    headers = ["", "share", "value", "vs all-treat", "vs no-treat", "vs random"]
    rows = []
    for rep in reports:
        est_cells = [rep.label or rep.outcome, f"{rep.share_treated:.3f}"]
        se_cells = ["", ""]
        for key in ("value", "gain_vs_all_treat", "gain_vs_no_treat", "gain_vs_random"):
            est: EstimateWithSE = getattr(rep, key)
            stars = significance_stars(est.estimate, est.se)
            est_cells.append(f"{est.estimate:.2f}{stars}")
            se_cells.append(f"({est.se:.2f})")
        rows.append(est_cells)
        rows.append(se_cells)
    widths = [max(len(row[i]) for row in [headers] + rows) for i in range(len(headers))]
    lines = []
    if title:
        lines.append(title)
    lines.append("  ".join(h.rjust(w) for h, w in zip(headers, widths)))
    for row in rows:
        lines.append("  ".join(c.rjust(w) for c, w in zip(row, widths)))
    return "\n".join(lines)
