"""Per-unit doubly robust scores and average-treatment-effect estimators.

The score of unit i decomposes as Gamma_i(1) - Gamma_i(-1) with

    Gamma_i(1)  = mu_1(z_i)  + 1{d_i = +1} * (y_i - mu_1(z_i))  / p(z_i)
    Gamma_i(-1) = mu_-1(z_i) + 1{d_i = -1} * (y_i - mu_-1(z_i)) / (1 - p(z_i))

so that mean(Gamma) estimates the average treatment effect and stays
consistent when either the outcome means or the propensity score is
mis-specified (but not both).  The net reward Gamma_i - c is what the
policy learners maximize.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from ._lm import hc1_covariance, ols
from .dataset import Dataset
from .exceptions import NumericalError, ValidationError
from .nuisance import NuisanceSpec, StratumDesign, fit_nuisances
from .validation import check_aligned, check_vector

__all__ = [
    "ScoreSet",
    "compute_aipw",
    "build_scores",
    "estimate_ate_aipw",
    "estimate_ate_ols",
    "save_scores_csv",
    "load_scores_csv",
]


@dataclass(frozen=True)
class ScoreSet:
    """Per-unit scores for one outcome column.

    ``gamma == gamma1 - gamma_neg1`` and ``net_reward == gamma - cost``
    hold exactly (bitwise), which construction and reload both preserve.
    """

    gamma1: np.ndarray
    gamma_neg1: np.ndarray
    gamma: np.ndarray
    net_reward: np.ndarray
    outcome: str
    cost: float
    provenance: str = ""

    def __post_init__(self):
        for name in ("gamma1", "gamma_neg1", "gamma", "net_reward"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValidationError(f"score column {name} contains non-finite values")
        if not np.array_equal(self.gamma, self.gamma1 - self.gamma_neg1):
            raise ValidationError("gamma must equal gamma1 - gamma_neg1 exactly")
        if not np.array_equal(self.net_reward, self.gamma - self.cost):
            raise ValidationError("net_reward must equal gamma - cost exactly")

    @property
    def n(self) -> int:
        return self.gamma.shape[0]

    def with_cost(self, cost: float) -> "ScoreSet":
        return ScoreSet(
            gamma1=self.gamma1, gamma_neg1=self.gamma_neg1, gamma=self.gamma,
            net_reward=self.gamma - cost, outcome=self.outcome, cost=cost,
            provenance=self.provenance,
        )


def compute_aipw(
    dataset: Dataset,
    p_hat,
    mu_treated,
    mu_control,
    outcome: str = "y",
    cost: float | None = None,
    provenance: str = "",
) -> ScoreSet:
    """Build the per-unit score set from nuisance predictions."""
    n = dataset.n
    p_hat = check_vector(p_hat, name="p_hat", n=n)
    mu1 = check_vector(mu_treated, name="mu_treated", n=n)
    mu0 = check_vector(mu_control, name="mu_control", n=n)
    if np.any(p_hat <= 0.0) or np.any(p_hat >= 1.0):
        raise NumericalError("propensity predictions at 0 or 1 make scores undefined")
    y = dataset.outcome(outcome)
    treated = dataset.d == 1
    gamma1 = mu1 + np.where(treated, (y - mu1) / p_hat, 0.0)
    gamma_neg1 = mu0 + np.where(~treated, (y - mu0) / (1.0 - p_hat), 0.0)
    gamma = gamma1 - gamma_neg1
    if not np.all(np.isfinite(gamma)):
        raise NumericalError("non-finite scores")
    c = dataset.cost if cost is None else float(cost)
    return ScoreSet(
        gamma1=gamma1, gamma_neg1=gamma_neg1, gamma=gamma,
        net_reward=gamma - c, outcome=outcome, cost=c, provenance=provenance,
    )


def build_scores(
    dataset: Dataset,
    spec: NuisanceSpec | None = None,
    outcome: str = "y",
    cost: float | None = None,
) -> ScoreSet:
    """Fit nuisances under ``spec`` and return the resulting score set."""
    spec = spec or NuisanceSpec()
    fit = fit_nuisances(dataset, spec, outcome)
    return compute_aipw(
        dataset, fit.p_hat, fit.mu_treated, fit.mu_control,
        outcome=outcome, cost=cost, provenance=spec.label(),
    )


def estimate_ate_aipw(scores: ScoreSet) -> tuple[float, float]:
    """Average-treatment-effect estimate and its standard error.

    The estimate is the score mean; the standard error is the sample
    standard deviation of the scores over sqrt(N).
    """
    if scores.n < 2:
        raise ValidationError("need N >= 2 for a standard error")
    gamma = scores.gamma
    return float(np.mean(gamma)), float(np.std(gamma, ddof=1) / np.sqrt(scores.n))


def estimate_ate_ols(
    dataset: Dataset,
    controls: str | None = None,
    outcome: str = "y",
) -> tuple[float, float]:
    """ATE from least squares of the outcome on a treated indicator.

    ``controls`` adds stratum dummies ('main' or 'saturated', first cell
    dropped).  The standard error is heteroskedasticity-robust (HC1).
    """
    y = dataset.outcome(outcome)
    treated = (dataset.d == 1).astype(float)
    columns = [np.ones(dataset.n), treated]
    names = ["intercept", "treated"]
    if controls is not None:
        design = StratumDesign(controls)
        block, block_names, _ = design.build(dataset)
        # drop the design's own intercept / first cell to keep full rank
        keep = slice(1, None)
        columns.extend(block[:, keep].T)
        names.extend(block_names[1:])
    X = np.column_stack(columns)
    beta, resid = ols(X, y, names)
    cov = hc1_covariance(X, resid)
    return float(beta[1]), float(np.sqrt(cov[1, 1]))


def save_scores_csv(scores: ScoreSet, ids, path, header_comment: str | None = None) -> None:
    """Audit export: ``id, gamma1, gamma_neg1, gamma, net_reward``."""
    check_aligned(scores.n, ids=np.asarray(ids, dtype=object))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        fh.write(f"# cost={scores.cost!r} outcome={scores.outcome}\n")
        writer = csv.writer(fh)
        writer.writerow(["id", "gamma1", "gamma_neg1", "gamma", "net_reward"])
        for i in range(scores.n):
            writer.writerow(
                [ids[i], repr(float(scores.gamma1[i])), repr(float(scores.gamma_neg1[i])),
                 repr(float(scores.gamma[i])), repr(float(scores.net_reward[i]))]
            )


def load_scores_csv(path, ids=None, outcome: str = "y") -> ScoreSet:
    """Reload an exported score CSV, checking id alignment when given."""
    cost = None
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = []
        for line in fh:
            if line.startswith("#"):
                if "cost=" in line:
                    cost = float(line.split("cost=")[1].split()[0])
                continue
            rows.append(line)
    reader = csv.reader(rows)
    header = next(reader, None)
    if header != ["id", "gamma1", "gamma_neg1", "gamma", "net_reward"]:
        raise ValidationError(f"{path}: not a score export (header {header})")
    file_ids, g1, g0, g, r = [], [], [], [], []
    for row in reader:
        file_ids.append(row[0])
        g1.append(float(row[1]))
        g0.append(float(row[2]))
        g.append(float(row[3]))
        r.append(float(row[4]))
    if not file_ids:
        raise ValidationError(f"{path}: no score rows")
    if ids is not None and tuple(file_ids) != tuple(ids):
        raise ValidationError(f"{path}: score ids do not match the dataset rows")
    gamma = np.array(g)
    net = np.array(r)
    if cost is None:
        cost = float(gamma[0] - net[0])
    return ScoreSet(gamma1=np.array(g1), gamma_neg1=np.array(g0), gamma=gamma,
                    net_reward=net, outcome=outcome, cost=cost,
                    provenance=f"loaded:{path}")
