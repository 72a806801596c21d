"""Canonical experiment dataset: CSV ingestion, schema validation, folds.

A dataset row is one experimental subject with an outcome ``y`` in currency
units, a treatment indicator ``d`` coded {-1, +1}, integer stratum codes
``z`` (the variables the randomization was stratified on), and real-valued
heterogeneity features ``x``.  Treatment is stored internally as {-1, +1}
even when the source file uses {0, 1}: the +-1 algebra is what the scoring
and policy-value estimators use directly.

Stratum columns are categorical.  Ingestion re-codes them to dense integer
categories in first-appearance order and records the code book, so a
round-trip through :func:`save_csv` reproduces the original labels.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import ValidationError

__all__ = [
    "Schema",
    "Dataset",
    "IngestConfig",
    "load_csv",
    "save_csv",
    "split_folds",
]


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Schema:
    """Column layout of a dataset: names, stratum cardinalities, code books."""

    feature_names: tuple[str, ...]
    stratum_names: tuple[str, ...]
    stratum_cards: tuple[int, ...]
    extra_outcome_names: tuple[str, ...] = ()
    # one {original label -> integer code} map per stratum variable
    code_books: tuple[dict[str, int], ...] = ()

    def __post_init__(self):
        if len(set(self.feature_names)) != len(self.feature_names):
            raise ValidationError("feature names must be unique")
        outcome_names = ("y",) + self.extra_outcome_names
        if len(set(outcome_names)) != len(outcome_names):
            raise ValidationError("outcome names must be unique")
        if set(outcome_names) & set(self.feature_names):
            raise ValidationError("outcome names must be disjoint from feature names")
        if len(self.stratum_names) != len(self.stratum_cards):
            raise ValidationError("stratum names and cardinalities differ in length")
        if self.code_books and len(self.code_books) != len(self.stratum_names):
            raise ValidationError("one code book per stratum variable required")

    def to_json(self) -> str:
        return json.dumps(
            {
                "feature_names": list(self.feature_names),
                "stratum_names": list(self.stratum_names),
                "stratum_cards": list(self.stratum_cards),
                "extra_outcome_names": list(self.extra_outcome_names),
                "code_books": [dict(cb) for cb in self.code_books],
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "Schema":
        obj = json.loads(text)
        return cls(
            feature_names=tuple(obj["feature_names"]),
            stratum_names=tuple(obj["stratum_names"]),
            stratum_cards=tuple(obj["stratum_cards"]),
            extra_outcome_names=tuple(obj.get("extra_outcome_names", ())),
            code_books=tuple(
                {str(k): int(v) for k, v in cb.items()}
                for cb in obj.get("code_books", ())
            ),
        )


@dataclass(frozen=True)
class Dataset:
    """Immutable container for one experimental sample.

    Arrays are aligned by row and marked read-only, so a dataset can be
    shared freely across worker threads.
    """

    schema: Schema
    ids: tuple[str, ...]
    y: np.ndarray  # float64 outcome, currency units
    d: np.ndarray  # int64 treatment in {-1, +1}
    z: np.ndarray  # int64 (n, n_strata) stratum codes
    x: np.ndarray  # float64 (n, n_features)
    extra_outcomes: dict[str, np.ndarray] = field(default_factory=dict)
    cost: float = 0.0
    # held-out fold slices are allowed to contain a single arm; experiment
    # containers (loaded or generated data) are not
    allow_single_arm: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.ids)
        y = _freeze(np.asarray(self.y, dtype=np.float64))
        d = _freeze(np.asarray(self.d, dtype=np.int64))
        z = _freeze(np.asarray(self.z, dtype=np.int64).reshape(n, -1))
        x = _freeze(np.asarray(self.x, dtype=np.float64).reshape(n, -1))
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "x", x)
        extra = {k: _freeze(np.asarray(v, dtype=np.float64)) for k, v in self.extra_outcomes.items()}
        object.__setattr__(self, "extra_outcomes", extra)

        if n == 0:
            raise ValidationError("dataset has zero rows")
        for name, arr in (("y", y), ("d", d)):
            if arr.shape[0] != n:
                raise ValidationError(f"column {name} has {arr.shape[0]} rows, expected {n}")
        if z.shape != (n, len(self.schema.stratum_names)):
            raise ValidationError(
                f"stratum block has shape {z.shape}, schema declares "
                f"{len(self.schema.stratum_names)} stratum variables"
            )
        if x.shape != (n, len(self.schema.feature_names)):
            raise ValidationError(
                f"feature block has shape {x.shape}, schema declares "
                f"{len(self.schema.feature_names)} features"
            )
        if not np.all(np.isfinite(y)):
            raise ValidationError("outcome y contains non-finite values")
        if not np.all(np.isfinite(x)):
            raise ValidationError("features contain non-finite values")
        if not np.all(np.isin(d, (-1, 1))):
            raise ValidationError("treatment d must take values in {-1, +1}")
        if not self.allow_single_arm and not (np.any(d == 1) and np.any(d == -1)):
            raise ValidationError("dataset needs at least one treated and one control unit")
        for j, card in enumerate(self.schema.stratum_cards):
            col = z[:, j]
            if col.min(initial=0) < 0 or (col.size and col.max() >= card):
                raise ValidationError(
                    f"stratum {self.schema.stratum_names[j]} has codes outside "
                    f"[0, {card})"
                )
        if set(extra) != set(self.schema.extra_outcome_names):
            raise ValidationError("extra outcomes do not match schema")
        for name, arr in extra.items():
            if arr.shape[0] != n:
                raise ValidationError(f"extra outcome {name} has wrong length")
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"extra outcome {name} contains non-finite values")
        if not (np.isfinite(self.cost) and self.cost >= 0):
            raise ValidationError("treatment cost must be a non-negative real")

    @property
    def n(self) -> int:
        return len(self.ids)

    def outcome(self, name: str = "y") -> np.ndarray:
        """Return the outcome column ``name`` ('y' or one of the extras)."""
        if name == "y":
            return self.y
        try:
            return self.extra_outcomes[name]
        except KeyError:
            raise ValidationError(
                f"unknown outcome {name!r}; declared: "
                f"{['y', *self.schema.extra_outcome_names]}"
            ) from None

    def subset(self, indices, allow_single_arm: bool = False) -> "Dataset":
        """Row subset preserving order of ``indices``."""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            schema=self.schema,
            ids=tuple(self.ids[i] for i in idx),
            y=self.y[idx],
            d=self.d[idx],
            z=self.z[idx],
            x=self.x[idx],
            extra_outcomes={k: v[idx] for k, v in self.extra_outcomes.items()},
            cost=self.cost,
            allow_single_arm=allow_single_arm,
        )

    def with_cost(self, cost: float) -> "Dataset":
        return replace(self, cost=cost)

    def feature_index(self, names) -> np.ndarray:
        """Column indices of the named features; raises listing the missing."""
        missing = [f for f in names if f not in self.schema.feature_names]
        if missing:
            raise ValidationError(f"features missing from dataset schema: {missing}")
        lookup = {f: j for j, f in enumerate(self.schema.feature_names)}
        return np.array([lookup[f] for f in names], dtype=np.int64)


@dataclass(frozen=True)
class IngestConfig:
    """Names the columns of a CSV file and how treatment is coded.

    ``treatment_coding`` is either ``"pm1"`` (file stores -1/+1) or ``"01"``
    (file stores 0/1 and 0 maps to -1).
    """

    id_col: str = "id"
    outcome_col: str = "y"
    treatment_col: str = "d"
    treatment_coding: str = "pm1"
    stratum_prefix: str = "z_"
    feature_prefix: str = "x_"
    extra_outcome_prefix: str = "y2_"
    cost: float = 0.0

    def __post_init__(self):
        if self.treatment_coding not in ("pm1", "01"):
            raise ValidationError("treatment_coding must be 'pm1' or '01'")


def _parse_cell(text: str, column: str, row: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ValidationError(
            f"row {row}: cannot parse column {column!r} value {text!r} as a number"
        ) from None
    if not np.isfinite(value):
        raise ValidationError(f"row {row}: column {column!r} is non-finite ({text!r})")
    return value


def load_csv(path, config: IngestConfig | None = None) -> Dataset:
    """Load a dataset from a UTF-8 comma-separated file with a header row.

    Row order is preserved.  Stratum columns are re-coded to dense integer
    categories in first-appearance order; the code book is recorded in the
    schema.  Lines starting with ``#`` are metadata and are skipped.
    """
    config = config or IngestConfig()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(io.StringIO("".join(lines)))
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError(f"{path}: file is empty") from None

    for required in (config.id_col, config.outcome_col, config.treatment_col):
        if required not in header:
            raise ValidationError(f"{path}: missing required column {required!r}")
    col_of = {name: j for j, name in enumerate(header)}
    stratum_cols = [c for c in header if c.startswith(config.stratum_prefix)]
    feature_cols = [c for c in header if c.startswith(config.feature_prefix)]
    extra_cols = [c for c in header if c.startswith(config.extra_outcome_prefix)]

    ids: list[str] = []
    y: list[float] = []
    d: list[int] = []
    z_raw: list[list[str]] = []
    x: list[list[float]] = []
    extras: dict[str, list[float]] = {c: [] for c in extra_cols}

    valid_d = {"pm1": {"-1": -1, "1": 1, "-1.0": -1, "1.0": 1},
               "01": {"0": -1, "1": 1, "0.0": -1, "1.0": 1}}[config.treatment_coding]
    for row_number, row in enumerate(reader, start=2):
        if len(row) != len(header):
            raise ValidationError(
                f"row {row_number}: has {len(row)} cells, header has {len(header)}"
            )
        ids.append(row[col_of[config.id_col]])
        y.append(_parse_cell(row[col_of[config.outcome_col]], config.outcome_col, row_number))
        d_text = row[col_of[config.treatment_col]].strip()
        if d_text not in valid_d:
            raise ValidationError(
                f"row {row_number}: treatment value {d_text!r} outside "
                f"{config.treatment_coding!r} coding"
            )
        d.append(valid_d[d_text])
        z_raw.append([row[col_of[c]] for c in stratum_cols])
        x.append([_parse_cell(row[col_of[c]], c, row_number) for c in feature_cols])
        for c in extra_cols:
            extras[c].append(_parse_cell(row[col_of[c]], c, row_number))

    if not ids:
        raise ValidationError(f"{path}: no data rows")

    code_books: list[dict[str, int]] = []
    z_codes = np.zeros((len(ids), len(stratum_cols)), dtype=np.int64)
    for j in range(len(stratum_cols)):
        book: dict[str, int] = {}
        for i, row_labels in enumerate(z_raw):
            label = row_labels[j]
            if label not in book:
                book[label] = len(book)
            z_codes[i, j] = book[label]
        code_books.append(book)

    schema = Schema(
        feature_names=tuple(feature_cols),
        stratum_names=tuple(stratum_cols),
        stratum_cards=tuple(len(b) for b in code_books),
        extra_outcome_names=tuple(extra_cols),
        code_books=tuple(code_books),
    )
    return Dataset(
        schema=schema,
        ids=tuple(ids),
        y=np.array(y),
        d=np.array(d),
        z=z_codes,
        x=np.array(x).reshape(len(ids), len(feature_cols)),
        extra_outcomes={c: np.array(v) for c, v in extras.items()},
        cost=config.cost,
    )


def _fmt(value: float) -> str:
    # shortest decimal string that round-trips the binary64 value
    return repr(float(value))


def save_csv(dataset: Dataset, path, header_comment: str | None = None) -> None:
    """Write a dataset in the canonical CSV layout (treatment coded -1/+1).

    Stratum codes are written back as their original labels via the code
    book, so ``load_csv(save_csv(ds))`` reproduces ``ds`` exactly.
    """
    schema = dataset.schema
    inverse_books = [
        {code: label for label, code in book.items()} for book in schema.code_books
    ]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        writer = csv.writer(fh)
        writer.writerow(
            ["id", "y", "d", *schema.stratum_names, *schema.feature_names,
             *schema.extra_outcome_names]
        )
        for i in range(dataset.n):
            row = [dataset.ids[i], _fmt(dataset.y[i]), str(int(dataset.d[i]))]
            for j in range(len(schema.stratum_names)):
                code = int(dataset.z[i, j])
                row.append(inverse_books[j][code] if inverse_books else str(code))
            row.extend(_fmt(v) for v in dataset.x[i])
            row.extend(_fmt(dataset.extra_outcomes[c][i]) for c in schema.extra_outcome_names)
            writer.writerow(row)


def split_folds(n_or_dataset, k: int, seed: int) -> np.ndarray:
    """Assign each unit to one of ``k`` folds, sizes differing by at most 1.

    A seeded uniform random permutation is sliced into contiguous blocks,
    so the assignment is a deterministic function of (N, k, seed).
    """
    n = n_or_dataset.n if isinstance(n_or_dataset, Dataset) else int(n_or_dataset)
    if not 2 <= k <= n:
        raise ValidationError(f"fold count k={k} outside [2, N={n}]")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    assignment = np.empty(n, dtype=np.int64)
    for fold, block in enumerate(np.array_split(perm, k)):
        assignment[block] = fold
    return assignment
