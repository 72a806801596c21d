"""Nuisance models for score construction: p(z), mu_1(z), mu_-1(z).

The propensity score (probability of treatment given the stratum
characteristics) is fitted by a maximum-likelihood logit over stratum
dummies; the conditional outcome means are two independent per-arm OLS
fits over the same design.  Both support a ``main`` design (main-effect
dummies per stratum variable) and a ``saturated`` design (one indicator
per observed joint stratum cell), and both serialize to JSON for audit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._lm import logit_irls, ols, _sigmoid
from .dataset import Dataset, split_folds
from .exceptions import NumericalError, ValidationError

__all__ = [
    "StratumDesign",
    "PropensityModel",
    "OutcomeModel",
    "NuisanceSpec",
    "fit_propensity_logit",
    "fit_propensity_population",
    "fit_outcome_means",
    "cross_fit",
    "CrossFitResult",
    "fit_nuisances",
]

DEFAULT_CLIP = 0.01


@dataclass(frozen=True)
class StratumDesign:
    """Which stratum dummies enter the nuisance design.

    ``kind='main'`` uses an intercept plus first-category-dropped dummies
    for each stratum variable; ``kind='saturated'`` uses one indicator per
    joint stratum cell observed in the training data (no intercept).
    """

    kind: str = "main"

    def __post_init__(self):
        if self.kind not in ("main", "saturated"):
            raise ValidationError("design kind must be 'main' or 'saturated'")

    def build(self, dataset: Dataset, *, cells: list[tuple[int, ...]] | None = None):
        """Design matrix and column names for ``dataset``.

        For the saturated design the observed-cell list can be pinned with
        ``cells`` so that out-of-fold prediction uses the training cells.
        """
        z = dataset.z
        schema = dataset.schema
        if self.kind == "main":
            columns = [np.ones(dataset.n)]
            names = ["intercept"]
            for j, var in enumerate(schema.stratum_names):
                for category in range(1, schema.stratum_cards[j]):
                    columns.append((z[:, j] == category).astype(float))
                    names.append(f"{var}={_category_label(schema, j, category)}")
            return np.column_stack(columns), names, None
        observed = cells if cells is not None else sorted({tuple(r) for r in z.tolist()})
        unseen = {tuple(r) for r in z.tolist()} - set(observed)
        if unseen:
            raise ValidationError(
                f"stratum cells absent from the training design: {sorted(unseen)}"
            )
        columns = [np.all(z == np.asarray(cell), axis=1).astype(float) for cell in observed]
        names = [_cell_label(schema, cell) for cell in observed]
        return np.column_stack(columns) if columns else np.ones((dataset.n, 1)), names, observed


def _category_label(schema, j, category):
    if schema.code_books:
        for label, code in schema.code_books[j].items():
            if code == category:
                return label
    return str(category)


def _cell_label(schema, cell):
    if not schema.stratum_names:
        return "cell()"
    parts = [
        f"{var}={_category_label(schema, j, code)}"
        for j, (var, code) in enumerate(zip(schema.stratum_names, cell))
    ]
    return "cell(" + ",".join(parts) + ")"


def _single_arm_cells(dataset: Dataset, design: StratumDesign) -> list[str]:
    """Cells of the design whose units all fall in one treatment arm."""
    schema = dataset.schema
    offenders = []
    if design.kind == "saturated":
        groups: dict[tuple, list[int]] = {}
        for i, row in enumerate(map(tuple, dataset.z.tolist())):
            groups.setdefault(row, []).append(i)
        for cell, rows in sorted(groups.items()):
            arms = dataset.d[rows]
            if np.all(arms == 1) or np.all(arms == -1):
                offenders.append(_cell_label(schema, cell))
    else:
        # with main-effect dummies, a single-arm category of any one
        # stratum variable already separates the likelihood
        for j, var in enumerate(schema.stratum_names):
            for category in range(schema.stratum_cards[j]):
                mask = dataset.z[:, j] == category
                if not mask.any():
                    continue
                arms = dataset.d[mask]
                if np.all(arms == 1) or np.all(arms == -1):
                    offenders.append(f"{var}={_category_label(schema, j, category)}")
    return offenders


@dataclass
class PropensityModel:
    """Fitted propensity score p(z), either a logit or a fixed table."""

    design: StratumDesign | None
    column_names: list[str]
    coefficients: np.ndarray | None
    clip: float = DEFAULT_CLIP
    cells: list[tuple[int, ...]] | None = None
    population_table: dict[tuple[int, ...], float] | None = None
    fitted: bool = True

    def predict(self, dataset: Dataset) -> np.ndarray:
        """Per-unit treatment probabilities, clipped to [clip, 1 - clip]."""
        if self.population_table is not None:
            p = np.empty(dataset.n)
            for i, cell in enumerate(map(tuple, dataset.z.tolist())):
                if cell not in self.population_table:
                    raise ValidationError(
                        f"population propensity table missing cell "
                        f"{_cell_label(dataset.schema, cell)}"
                    )
                p[i] = self.population_table[cell]
        else:
            design_matrix, _, _ = self.design.build(dataset, cells=self.cells)
            p = _sigmoid(design_matrix @ self.coefficients)
        return np.clip(p, self.clip, 1.0 - self.clip)

    def to_json(self) -> str:
        obj = {"model": "propensity", "clip": self.clip}
        if self.population_table is not None:
            obj["population_table"] = [
                {"cell": list(cell), "p": p} for cell, p in sorted(self.population_table.items())
            ]
        else:
            obj.update(
                design=self.design.kind,
                columns=self.column_names,
                coefficients=[float(b) for b in self.coefficients],
                cells=[list(c) for c in self.cells] if self.cells is not None else None,
            )
        return json.dumps(obj, indent=2)


@dataclass
class OutcomeModel:
    """Arm-specific conditional outcome means over the stratum design."""

    design: StratumDesign
    column_names: list[str]
    coef_treated: np.ndarray
    coef_control: np.ndarray
    resid_var_treated: float
    resid_var_control: float
    outcome: str = "y"
    cells: list[tuple[int, ...]] | None = None

    def predict(self, dataset: Dataset):
        """Per-unit (mu_1, mu_-1) predictions."""
        design_matrix, _, _ = self.design.build(dataset, cells=self.cells)
        return design_matrix @ self.coef_treated, design_matrix @ self.coef_control

    def to_json(self) -> str:
        return json.dumps(
            {
                "model": "outcome_means",
                "outcome": self.outcome,
                "design": self.design.kind,
                "columns": self.column_names,
                "coef_treated": [float(b) for b in self.coef_treated],
                "coef_control": [float(b) for b in self.coef_control],
                "resid_var_treated": self.resid_var_treated,
                "resid_var_control": self.resid_var_control,
                "cells": [list(c) for c in self.cells] if self.cells is not None else None,
            },
            indent=2,
        )


def fit_propensity_logit(
    dataset: Dataset,
    design: StratumDesign | str = "main",
    *,
    clip: float = DEFAULT_CLIP,
) -> PropensityModel:
    """Fit the propensity score by maximum-likelihood logit on stratum dummies."""
    design = StratumDesign(design) if isinstance(design, str) else design
    offenders = _single_arm_cells(dataset, design)
    if offenders:
        raise NumericalError(
            f"propensity logit separation: single-arm stratum cell(s) {offenders}"
        )
    X, names, cells = design.build(dataset)
    y01 = (dataset.d == 1).astype(float)
    beta, _ = logit_irls(X, y01)
    return PropensityModel(
        design=design, column_names=names, coefficients=beta, clip=clip, cells=cells
    )


def fit_propensity_population(
    dataset: Dataset,
    table: dict[tuple[int, ...], float],
    *,
    clip: float = DEFAULT_CLIP,
) -> PropensityModel:
    """Propensity model returning supplied per-stratum-cell probabilities."""
    table = {tuple(int(c) for c in cell): float(p) for cell, p in table.items()}
    for cell, p in table.items():
        if not 0.0 < p < 1.0:
            raise ValidationError(f"population propensity for cell {cell} outside (0, 1)")
    present = {tuple(r) for r in dataset.z.tolist()}
    missing = present - set(table)
    if missing:
        raise ValidationError(
            f"population propensity table missing cells: {sorted(missing)}"
        )
    return PropensityModel(
        design=None, column_names=[], coefficients=None, clip=clip,
        population_table=table,
    )


def fit_outcome_means(
    dataset: Dataset,
    design: StratumDesign | str = "main",
    outcome: str = "y",
) -> OutcomeModel:
    """Fit mu_1(z) and mu_-1(z) by independent per-arm least squares."""
    design = StratumDesign(design) if isinstance(design, str) else design
    X, names, cells = design.build(dataset)
    y = dataset.outcome(outcome)
    coefs, resid_vars = [], []
    for arm in (1, -1):
        mask = dataset.d == arm
        if mask.sum() < X.shape[1]:
            raise NumericalError(
                f"arm {arm:+d} has {int(mask.sum())} observations, fewer than the "
                f"design rank {X.shape[1]}"
            )
        beta, resid = ols(X[mask], y[mask], names)
        coefs.append(beta)
        dof = max(int(mask.sum()) - X.shape[1], 1)
        resid_vars.append(float(resid @ resid) / dof)
    return OutcomeModel(
        design=design, column_names=names,
        coef_treated=coefs[0], coef_control=coefs[1],
        resid_var_treated=resid_vars[0], resid_var_control=resid_vars[1],
        outcome=outcome, cells=cells,
    )


@dataclass(frozen=True)
class NuisanceSpec:
    """How nuisances are estimated when building scores.

    ``propensity`` is ``'logit'`` or ``'population'`` (the latter requires
    ``population_table``); ``crossfit_k`` switches plug-in predictions to
    out-of-fold predictions from a k-fold split.
    """

    design: str = "main"
    propensity: str = "logit"
    population_table: dict | None = None
    clip: float = DEFAULT_CLIP
    crossfit_k: int | None = None
    crossfit_seed: int = 0

    def __post_init__(self):
        if self.propensity not in ("logit", "population"):
            raise ValidationError("propensity must be 'logit' or 'population'")
        if self.propensity == "population" and self.population_table is None:
            raise ValidationError("population propensity requires a table")

    def fit_propensity(self, dataset: Dataset) -> PropensityModel:
        if self.propensity == "population":
            return fit_propensity_population(dataset, self.population_table, clip=self.clip)
        return fit_propensity_logit(dataset, self.design, clip=self.clip)

    def label(self) -> str:
        tag = f"{self.propensity},design={self.design}"
        if self.crossfit_k:
            tag += f",crossfit(k={self.crossfit_k},seed={self.crossfit_seed})"
        return tag


@dataclass
class CrossFitResult:
    """Per-unit out-of-fold nuisance predictions."""

    p_hat: np.ndarray
    mu_treated: np.ndarray
    mu_control: np.ndarray
    fold_assignment: np.ndarray | None = None


def cross_fit(
    dataset: Dataset,
    k: int,
    seed: int,
    spec: NuisanceSpec | None = None,
    outcome: str = "y",
) -> CrossFitResult:
    """Out-of-fold nuisance predictions: unit i's values come from models
    fitted with fold(i) held out."""
    spec = spec or NuisanceSpec()
    folds = split_folds(dataset.n, k, seed)
    p_hat = np.empty(dataset.n)
    mu1 = np.empty(dataset.n)
    mu0 = np.empty(dataset.n)
    for fold in range(k):
        held = np.flatnonzero(folds == fold)
        train = np.flatnonzero(folds != fold)
        try:
            train_ds = dataset.subset(train)
            prop = spec.fit_propensity(train_ds)
            out = fit_outcome_means(train_ds, spec.design, outcome)
        except (ValidationError, NumericalError) as err:
            raise type(err)(f"fold {fold}: {err}") from err
        held_ds = dataset.subset(held, allow_single_arm=True)
        try:
            p_hat[held] = prop.predict(held_ds)
            mu1[held], mu0[held] = out.predict(held_ds)
        except (ValidationError, NumericalError) as err:
            raise type(err)(f"fold {fold}: {err}") from err
    return CrossFitResult(p_hat=p_hat, mu_treated=mu1, mu_control=mu0,
                          fold_assignment=folds)


def fit_nuisances(dataset: Dataset, spec: NuisanceSpec | None = None,
                  outcome: str = "y") -> CrossFitResult:
    """Per-unit nuisance predictions under ``spec`` (plug-in or cross-fitted)."""
    spec = spec or NuisanceSpec()
    if spec.crossfit_k:
        return cross_fit(dataset, spec.crossfit_k, spec.crossfit_seed, spec, outcome)
    prop = spec.fit_propensity(dataset)
    out = fit_outcome_means(dataset, spec.design, outcome)
    mu1, mu0 = out.predict(dataset)
    return CrossFitResult(p_hat=prop.predict(dataset), mu_treated=mu1, mu_control=mu0)
