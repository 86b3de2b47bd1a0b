"""CSV ingestion, deterministic splits, standardization, and a synthetic
monotone-data generator so the suite runs without downloaded datasets.

Decreasing-annotated columns are negated after standardization, so the
in-memory tables only carry increasing/free annotations; models trained on a
table therefore pair with the dataset spec that produced it (the spec's
split seed and train statistics reproduce the exact pipeline).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstraintError, DataError
from .network import FREE, INCREASING, FeatureAnnotation

TASK_REGRESSION = "regression"
TASK_CLASSIFICATION = "classification"


@dataclass
class DatasetSpec:
    csv_path: str
    target: str
    task: str = TASK_REGRESSION
    increasing: tuple = ()
    decreasing: tuple = ()
    free: tuple = ()
    train_fraction: float = 0.8
    split_seed: int = 0
    standardize: bool = True

    def __post_init__(self):
        self.increasing = tuple(self.increasing)
        self.decreasing = tuple(self.decreasing)
        self.free = tuple(self.free)
        if self.task not in (TASK_REGRESSION, TASK_CLASSIFICATION):
            raise ConstraintError(f"unknown task {self.task!r}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConstraintError("train_fraction must be in (0, 1)")
        annotated = self.increasing + self.decreasing + self.free
        if len(set(annotated)) != len(annotated):
            raise ConstraintError("feature annotations must be disjoint")
        if self.target in annotated:
            raise ConstraintError("target column cannot be annotated")

    @classmethod
    def from_dict(cls, doc: dict) -> "DatasetSpec":
        try:
            return cls(
                csv_path=doc["csv"],
                target=doc["target"],
                task=doc.get("task", TASK_REGRESSION),
                increasing=doc.get("increasing", ()),
                decreasing=doc.get("decreasing", ()),
                free=doc.get("free", ()),
                train_fraction=float(doc.get("train_fraction", 0.8)),
                split_seed=int(doc.get("split_seed", 0)),
                standardize=bool(doc.get("standardize", True)),
            )
        except KeyError as exc:
            raise ConstraintError(f"dataset config missing field {exc}") from exc


@dataclass
class Table:
    X: np.ndarray
    y: np.ndarray
    columns: tuple
    annotation: FeatureAnnotation
    negated: tuple = field(default=())  # original-direction names, already negated

    def __len__(self):
        return self.X.shape[0]


def _read_csv(path):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in rows if r]
    if len(rows) < 2:
        raise DataError(f"{path}: need a header and at least one data row")
    return rows[0], rows[1:]


def load_dataset(spec: DatasetSpec):
    """Parse, split, standardize on train statistics, negate decreasing
    columns; returns (train, test) tables."""
    header, raw = _read_csv(spec.csv_path)
    col_index = {name: i for i, name in enumerate(header)}
    for name in (spec.target,) + spec.increasing + spec.decreasing + spec.free:
        if name not in col_index:
            raise DataError(f"{spec.csv_path}: column {name!r} not in header {header}")
    feature_names = tuple(n for n in header if n != spec.target)
    target_idx = col_index[spec.target]

    n, d = len(raw), len(feature_names)
    X = np.empty((n, d))
    y = np.empty(n)
    for r, row in enumerate(raw):
        if len(row) != len(header):
            raise DataError(f"{spec.csv_path}: row {r + 2} has {len(row)} cells, "
                            f"expected {len(header)}")
        c = 0
        for j, cell in enumerate(row):
            try:
                value = float(cell)
            except ValueError as exc:
                raise DataError(
                    f"{spec.csv_path}: non-numeric value {cell!r} at row {r + 2}, "
                    f"column {header[j]!r}"
                ) from exc
            if j == target_idx:
                y[r] = value
            else:
                X[r, c] = value
                c += 1

    if spec.task == TASK_CLASSIFICATION and not np.all((y == 0.0) | (y == 1.0)):
        raise DataError(f"{spec.csv_path}: classification targets must be 0/1")

    rng = np.random.default_rng(spec.split_seed)
    order = rng.permutation(n)
    n_train = int(round(spec.train_fraction * n))
    n_train = min(max(n_train, 1), n - 1)
    tr_idx, te_idx = order[:n_train], order[n_train:]

    X_train, X_test = X[tr_idx], X[te_idx]
    y_train, y_test = y[tr_idx], y[te_idx]
    if spec.standardize:
        mean = X_train.mean(axis=0)
        std = X_train.std(axis=0)
        std[std == 0.0] = 1.0
        X_train = (X_train - mean) / std
        X_test = (X_test - mean) / std

    directions = []
    dec_cols = []
    for j, name in enumerate(feature_names):
        if name in spec.increasing:
            directions.append(INCREASING)
        elif name in spec.decreasing:
            directions.append(INCREASING)  # negated below, certified as increasing
            dec_cols.append(j)
        else:
            directions.append(FREE)
    if dec_cols:
        X_train = X_train.copy()
        X_train[:, dec_cols] *= -1.0
        X_test = X_test.copy()
        X_test[:, dec_cols] *= -1.0

    annotation = FeatureAnnotation(tuple(directions))
    negated = tuple(feature_names[j] for j in dec_cols)
    return (
        Table(X_train, y_train, feature_names, annotation, negated),
        Table(X_test, y_test, feature_names, annotation, negated),
    )


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def synthetic_monotone(n=400, d_increasing=2, d_decreasing=1, d_free=2, seed=0,
                       noise=0.05, task=TASK_REGRESSION):
    """Random tabular data whose target is monotone in the annotated features
    (plus observation noise); returns (header, rows, spec_kwargs)."""
    rng = np.random.default_rng(seed)
    d = d_increasing + d_decreasing + d_free
    X = rng.uniform(-2.0, 2.0, size=(n, d))
    inc = slice(0, d_increasing)
    dec = slice(d_increasing, d_increasing + d_decreasing)
    fre = slice(d_increasing + d_decreasing, d)
    signal = (np.log1p(np.exp(1.5 * X[:, inc])).sum(axis=1)
              - np.log1p(np.exp(1.5 * X[:, dec])).sum(axis=1)
              + 0.5 * np.sin(2.0 * X[:, fre]).sum(axis=1))
    if task == TASK_REGRESSION:
        y = signal + noise * rng.standard_normal(n)
    else:
        p = 1.0 / (1.0 + np.exp(-(signal - np.median(signal))))
        y = (rng.random(n) < p).astype(float)
    header = ([f"inc{i}" for i in range(d_increasing)]
              + [f"dec{i}" for i in range(d_decreasing)]
              + [f"free{i}" for i in range(d_free)] + ["target"])
    rows = [[repr(float(v)) for v in X[i]] + [repr(float(y[i]))] for i in range(n)]
    spec_kwargs = {
        "target": "target",
        "task": task,
        "increasing": tuple(f"inc{i}" for i in range(d_increasing)),
        "decreasing": tuple(f"dec{i}" for i in range(d_decreasing)),
    }
    return header, rows, spec_kwargs


def autompg_spec(csv_path="data/autompg.csv", split_seed=0) -> DatasetSpec:
    """AutoMPG: 7 features, 3 monotonically decreasing w.r.t. mpg."""
    return DatasetSpec(
        csv_path=csv_path,
        target="mpg",
        task=TASK_REGRESSION,
        decreasing=("displacement", "horsepower", "weight"),
        split_seed=split_seed,
    )


def heart_spec(csv_path="data/heart.csv", split_seed=0) -> DatasetSpec:
    """Heart Disease: 13 features, 2 monotonically increasing w.r.t. risk."""
    return DatasetSpec(
        csv_path=csv_path,
        target="target",
        task=TASK_CLASSIFICATION,
        increasing=("trestbps", "chol"),
        split_seed=split_seed,
    )
