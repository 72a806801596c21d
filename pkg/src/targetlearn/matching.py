"""Caliper membership-score matching between two samples, plus balance
diagnostics, for rule-transfer analysis.

The two samples are pooled with a membership label and a logit estimates
each unit's probability of belonging to the reference sample A.  Every A
unit is matched to its nearest B unit by absolute membership-probability
difference (1-nearest-neighbor, with replacement, ties to the lower B
index); pairs farther apart than the caliper radius are dropped.  Rule
transfer is then evaluated on the matched subset of B, which restores
similarity to A when the samples have drifted apart.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from ._lm import logit_irls, _sigmoid
from .dataset import Dataset
from .evaluation import ValueReport, transfer_evaluate
from .exceptions import ValidationError
from .nuisance import NuisanceSpec

__all__ = [
    "MatchResult",
    "caliper_match",
    "standardized_difference",
    "transfer_with_radius_sweep",
    "RadiusSweepEntry",
]

DEFAULT_RADIUS = 0.1


@dataclass
class MatchResult:
    """Matched (A index, B index, distance) pairs within the radius."""

    pairs: list[tuple[int, int, float]]
    radius: float
    unmatched_a: int

    @property
    def matched_b_indices(self) -> np.ndarray:
        return np.unique(np.array([b for _, b, _ in self.pairs], dtype=np.int64))

    def save_csv(self, sample_a: Dataset, sample_b: Dataset, path,
                 header_comment: str | None = None) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            writer = csv.writer(fh)
            writer.writerow(["a_id", "b_id", "distance"])
            for a, b, dist in self.pairs:
                writer.writerow([sample_a.ids[a], sample_b.ids[b], repr(float(dist))])


def _shared_feature_matrix(sample_a: Dataset, sample_b: Dataset):
    names = sample_a.schema.feature_names
    if sample_b.schema.feature_names != names:
        missing = [f for f in names if f not in sample_b.schema.feature_names]
        if missing:
            raise ValidationError(f"samples do not share features; B lacks {missing}")
        cols = sample_b.feature_index(names)
        return sample_a.x, sample_b.x[:, cols]
    return sample_a.x, sample_b.x


def membership_scores(sample_a: Dataset, sample_b: Dataset):
    """Fitted probability of belonging to sample A, for every unit."""
    xa, xb = _shared_feature_matrix(sample_a, sample_b)
    pooled = np.vstack([xa, xb])
    label = np.concatenate([np.ones(xa.shape[0]), np.zeros(xb.shape[0])])
    mean = pooled.mean(axis=0)
    scale = pooled.std(axis=0)
    scale[scale == 0.0] = 1.0
    design = np.column_stack([np.ones(pooled.shape[0]), (pooled - mean) / scale])
    beta, _ = logit_irls(design, label)
    prob = _sigmoid(design @ beta)
    return prob[: xa.shape[0]], prob[xa.shape[0]:]


def caliper_match(sample_a: Dataset, sample_b: Dataset,
                  radius: float = DEFAULT_RADIUS, seed: int = 0) -> MatchResult:
    """Nearest-B match for each A unit, keeping pairs within the radius.

    Matching is with replacement and fully deterministic (``seed`` is
    accepted for interface stability but unused: the membership logit and
    the lower-index tie rule leave nothing random).
    """
    del seed
    if not (radius > 0):
        raise ValidationError("caliper radius must be positive (math.inf keeps all)")
    p_a, p_b = membership_scores(sample_a, sample_b)
    # sort B by (probability, original index) so the first element of an
    # equal-probability run is the lowest original index
    order = np.lexsort((np.arange(p_b.shape[0]), p_b))
    sorted_p = p_b[order]
    pairs = []
    unmatched = 0
    for a_idx, prob in enumerate(p_a):
        pos = int(np.searchsorted(sorted_p, prob))
        candidates = []
        if pos > 0:
            candidates.append(pos - 1)
        if pos < sorted_p.shape[0]:
            candidates.append(pos)
        best = min(
            candidates,
            key=lambda c: (abs(sorted_p[c] - prob), order[c]),
        )
        distance = float(abs(sorted_p[best] - prob))
        if distance <= radius:
            pairs.append((a_idx, int(order[best]), distance))
        else:
            unmatched += 1
    return MatchResult(pairs=pairs, radius=float(radius), unmatched_a=unmatched)


def standardized_difference(sample_a, sample_b, feature: str | None = None) -> float:
    """100 * |mean_A - mean_B| / sqrt((var_A + var_B) / 2).

    Accepts two datasets plus a feature name, or two raw value arrays.
    Binary {0, 1} features use the p(1-p) variance.  Zero pooled variance
    with unequal means returns +inf.
    """
    if isinstance(sample_a, Dataset):
        if feature is None:
            raise ValidationError("feature name required with dataset inputs")
        va = sample_a.x[:, sample_a.feature_index([feature])[0]]
        vb = sample_b.x[:, sample_b.feature_index([feature])[0]]
    else:
        va = np.asarray(sample_a, dtype=float)
        vb = np.asarray(sample_b, dtype=float)
    pooled_values = np.concatenate([va, vb])
    binary = np.all(np.isin(pooled_values, (0.0, 1.0)))
    if binary:
        pa, pb = va.mean(), vb.mean()
        variance = (pa * (1 - pa) + pb * (1 - pb)) / 2.0
    else:
        variance = (np.var(va, ddof=1) + np.var(vb, ddof=1)) / 2.0
    gap = abs(float(va.mean() - vb.mean()))
    if variance == 0.0:
        return 0.0 if gap == 0.0 else math.inf
    return 100.0 * gap / math.sqrt(variance)


@dataclass
class RadiusSweepEntry:
    radius: float
    n_matched: int
    report: ValueReport | None
    empty: bool = False


def transfer_with_radius_sweep(
    rule,
    sample_a: Dataset,
    sample_b: Dataset,
    radii,
    outcome: str = "y",
    cost: float | None = None,
    nuisance: NuisanceSpec | None = None,
) -> list[RadiusSweepEntry]:
    """Rule-transfer gains on matched B subsets across caliper radii.

    Nearest neighbors are computed once; each radius only filters pairs,
    so the matched set grows with the radius.  An infinite radius uses the
    full B sample.
    """
    nn = caliper_match(sample_a, sample_b, radius=math.inf)
    entries = []
    for radius in radii:
        radius = float(radius)
        if math.isinf(radius):
            subset = sample_b
            n_matched = sample_b.n
        else:
            keep = np.array(
                sorted({b for _, b, dist in nn.pairs if dist <= radius}), dtype=np.int64
            )
            n_matched = keep.shape[0]
            if n_matched == 0:
                entries.append(RadiusSweepEntry(radius, 0, None, empty=True))
                continue
            try:
                subset = sample_b.subset(keep)
            except ValidationError:
                # e.g. matched subset lost one treatment arm
                entries.append(RadiusSweepEntry(radius, n_matched, None, empty=True))
                continue
        report = transfer_evaluate(
            rule, subset, outcome=outcome, cost=cost, nuisance=nuisance,
            label=f"radius {radius:g}",
        )
        entries.append(RadiusSweepEntry(radius, n_matched, report))
    return entries
