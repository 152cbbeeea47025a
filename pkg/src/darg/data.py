"""Dataset ingestion (KEEL and CSV), label encoding, standardization, splitting."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np


class DataFormatError(ValueError):
    """Raised when an input file cannot be parsed into a valid dataset."""


@dataclass(frozen=True)
class Dataset:
    """A fully numeric classification dataset.

    features: (n_samples, n_features) float matrix, categoricals already coded.
    labels:   (n_samples,) integer class indices in [0, n_classes).
    """

    features: np.ndarray
    labels: np.ndarray
    class_names: tuple[str, ...]
    feature_names: tuple[str, ...]

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def validate(self) -> "Dataset":
        """Check ingestion invariants; loaders call this, internal subsets need not."""
        if self.features.ndim != 2:
            raise DataFormatError("features must be a 2-d matrix")
        if self.features.shape[0] != self.labels.shape[0]:
            raise DataFormatError("feature row count does not match label count")
        if self.features.shape[1] != len(self.feature_names):
            raise DataFormatError("feature column count does not match feature names")
        if not np.all(np.isfinite(self.features)):
            raise DataFormatError("non-finite feature values after ingestion")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.n_classes):
            raise DataFormatError("label index out of range")
        counts = self.class_counts()
        missing = [self.class_names[i] for i in np.nonzero(counts == 0)[0]]
        if missing:
            raise DataFormatError(f"declared class(es) absent from data: {missing}")
        return self

    def subset(self, indices: np.ndarray) -> "Dataset":
        """Row subset sharing class/feature names (no re-validation)."""
        idx = np.asarray(indices)
        return Dataset(self.features[idx], self.labels[idx], self.class_names, self.feature_names)


@dataclass(frozen=True)
class ScalerParams:
    """Per-column standardization parameters; constant columns carry std 1."""

    means: np.ndarray
    std_devs: np.ndarray


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 0
    stratified: bool = True


# ---------------------------------------------------------------------------
# KEEL format
# ---------------------------------------------------------------------------

_MISSING_TOKENS = {"?", "<null>"}


def _parse_attribute(line: str, lineno: int):
    """Return (name, kind, categories) for one attribute declaration.

    kind is "numeric" or "categorical"; categories is the declared value
    tuple for categoricals, None otherwise.
    """
    body = line.split(None, 1)
    if len(body) < 2:
        raise DataFormatError(f"line {lineno}: attribute declaration missing a name")
    rest = body[1].strip()
    brace = rest.find("{")
    if brace >= 0:
        name = rest[:brace].strip()
        close = rest.rfind("}")
        if not name or close < brace:
            raise DataFormatError(f"line {lineno}: malformed categorical attribute")
        values = tuple(v.strip() for v in rest[brace + 1 : close].split(","))
        if any(not v for v in values):
            raise DataFormatError(f"line {lineno}: empty category value")
        return name, "categorical", values
    parts = rest.split(None, 1)
    name = parts[0]
    type_spec = parts[1].strip().lower() if len(parts) > 1 else ""
    if type_spec.startswith(("real", "integer", "numeric")) or type_spec == "":
        return name, "numeric", None
    raise DataFormatError(f"line {lineno}: unsupported attribute type {type_spec!r}")


def load_keel(path) -> Dataset:
    """Load a KEEL-format dataset file.

    Header directives (@relation/@attribute/@inputs/@outputs/@data, case
    insensitive) precede comma-separated data rows. Categorical attributes
    are integer-coded in declaration order; the class attribute is the one
    named by @outputs, defaulting to the last declared attribute.
    """
    attr_names: list[str] = []
    attr_kinds: list[str] = []
    attr_cats: list = []
    output_name = None
    data_start = None

    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if not line.startswith("@"):
            raise DataFormatError(f"line {lineno}: data row before @data directive")
        lowered = line.lower()
        if lowered.startswith("@relation"):
            continue
        if lowered.startswith("@attribute"):
            name, kind, cats = _parse_attribute(line, lineno)
            attr_names.append(name)
            attr_kinds.append(kind)
            attr_cats.append(cats)
        elif lowered.startswith("@inputs"):
            continue
        elif lowered.startswith("@outputs") or lowered.startswith("@output"):
            rest = line.split(None, 1)
            if len(rest) > 1:
                output_name = rest[1].split(",")[0].strip()
        elif lowered.startswith("@data"):
            data_start = lineno
            break
        else:
            raise DataFormatError(f"line {lineno}: unknown directive {line.split()[0]!r}")

    if data_start is None:
        raise DataFormatError("missing @data directive")
    if not attr_names:
        raise DataFormatError("no attribute declarations before @data")

    if output_name is not None:
        if output_name not in attr_names:
            raise DataFormatError(f"@outputs names unknown attribute {output_name!r}")
        class_pos = attr_names.index(output_name)
    else:
        class_pos = len(attr_names) - 1

    n_attrs = len(attr_names)
    feature_pos = [j for j in range(n_attrs) if j != class_pos]
    rows: list[list[float]] = []
    raw_labels: list[str] = []

    data_row = 0
    for lineno in range(data_start, len(lines)):
        line = lines[lineno].strip()
        if not line or line.startswith("%") or line.lower().startswith("@data"):
            continue
        data_row += 1
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != n_attrs:
            raise DataFormatError(
                f"line {lineno + 1} (data row {data_row}): expected {n_attrs} fields, got {len(fields)}"
            )
        values = []
        for j in feature_pos:
            tok = fields[j]
            if tok.lower() in _MISSING_TOKENS:
                raise DataFormatError(f"line {lineno + 1}: missing value in attribute {attr_names[j]!r}")
            if attr_kinds[j] == "categorical":
                try:
                    values.append(float(attr_cats[j].index(tok)))
                except ValueError:
                    raise DataFormatError(
                        f"line {lineno + 1}: unknown value {tok!r} for attribute {attr_names[j]!r}"
                    ) from None
            else:
                try:
                    values.append(float(tok))
                except ValueError:
                    raise DataFormatError(
                        f"line {lineno + 1}: non-numeric value {tok!r} in attribute {attr_names[j]!r}"
                    ) from None
        rows.append(values)
        raw_labels.append(fields[class_pos])

    if not rows:
        raise DataFormatError("no data rows")

    if attr_kinds[class_pos] == "categorical":
        class_names = tuple(attr_cats[class_pos])
        index_of = {name: i for i, name in enumerate(class_names)}
        labels = []
        for r, tok in enumerate(raw_labels, start=1):
            if tok not in index_of:
                raise DataFormatError(f"data row {r}: unknown class value {tok!r}")
            labels.append(index_of[tok])
    else:
        # Numeric class attribute: classes are the distinct observed values,
        # ordered ascending by numeric value.
        try:
            numeric = [float(tok) for tok in raw_labels]
        except ValueError:
            raise DataFormatError("non-numeric class value under a numeric class attribute") from None
        distinct = sorted(set(numeric))
        index_of_val = {v: i for i, v in enumerate(distinct)}
        class_names = tuple(_format_number(v) for v in distinct)
        labels = [index_of_val[v] for v in numeric]

    return Dataset(
        features=np.asarray(rows, dtype=np.float64),
        labels=np.asarray(labels, dtype=np.int64),
        class_names=class_names,
        feature_names=tuple(attr_names[j] for j in feature_pos),
    ).validate()


def _format_number(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(v)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def load_csv(path, label_column) -> Dataset:
    """Load a headered CSV. ``label_column`` is a column name or index.

    Columns where every cell parses as a number are numeric; any other
    column is categorical and coded by first appearance, matching the
    declaration-order rule used for KEEL files.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError("empty CSV file") from None
        header = [h.strip() for h in header]
        rows = []
        for r, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataFormatError(f"line {r}: expected {len(header)} fields, got {len(row)}")
            rows.append([c.strip() for c in row])

    if not rows:
        raise DataFormatError("CSV has a header but no data rows")

    if isinstance(label_column, int):
        if not -len(header) <= label_column < len(header):
            raise DataFormatError(f"label column index {label_column} out of range")
        class_pos = label_column % len(header)
    else:
        if label_column not in header:
            raise DataFormatError(f"label column {label_column!r} not found in header")
        class_pos = header.index(label_column)

    feature_pos = [j for j in range(len(header)) if j != class_pos]

    def cell_ok(tok):
        return tok != "" and tok.lower() not in _MISSING_TOKENS

    columns = []
    for j in feature_pos:
        raw = [row[j] for row in rows]
        for r, tok in enumerate(raw, start=1):
            if not cell_ok(tok):
                raise DataFormatError(f"data row {r}: missing value in column {header[j]!r}")
        try:
            columns.append([float(tok) for tok in raw])
        except ValueError:
            codes: dict[str, int] = {}
            columns.append([float(codes.setdefault(tok, len(codes))) for tok in raw])

    label_raw = [row[class_pos] for row in rows]
    for r, tok in enumerate(label_raw, start=1):
        if not cell_ok(tok):
            raise DataFormatError(f"data row {r}: missing class value")
    label_codes: dict[str, int] = {}
    labels = [label_codes.setdefault(tok, len(label_codes)) for tok in label_raw]

    return Dataset(
        features=np.asarray(columns, dtype=np.float64).T.copy()
        if columns
        else np.empty((len(rows), 0)),
        labels=np.asarray(labels, dtype=np.int64),
        class_names=tuple(label_codes.keys()),
        feature_names=tuple(header[j] for j in feature_pos),
    ).validate()


# ---------------------------------------------------------------------------
# Standardization and splitting
# ---------------------------------------------------------------------------


def fit_scaler(X: np.ndarray) -> ScalerParams:
    """Column means and population standard deviations; zero std becomes 1."""
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    stds = np.where(stds == 0.0, 1.0, stds)
    return ScalerParams(means=means, std_devs=stds)


def apply_scaler(X: np.ndarray, params: ScalerParams) -> np.ndarray:
    if X.shape[1] != params.means.shape[0]:
        raise ValueError(
            f"feature count {X.shape[1]} does not match scaler dimension {params.means.shape[0]}"
        )
    return (X - params.means) / params.std_devs


def standardize(train: Dataset, test: Dataset) -> tuple[Dataset, Dataset, ScalerParams]:
    """Standardize both partitions with parameters fitted on the train partition."""
    if train.n_features != test.n_features:
        raise ValueError("train and test feature dimensions differ")
    params = fit_scaler(train.features)
    train_out = Dataset(
        apply_scaler(train.features, params), train.labels, train.class_names, train.feature_names
    )
    test_out = Dataset(
        apply_scaler(test.features, params), test.labels, test.class_names, test.feature_names
    )
    return train_out, test_out, params


def stratified_split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Deterministic stratified train/test split.

    Per-class counts are rounded to the train fraction; every class with at
    least two samples appears in both partitions, singleton classes go to
    train. Row order within each partition follows the original dataset.
    """
    if not 0.0 < spec.train_fraction < 1.0:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    rng = np.random.default_rng(spec.seed)
    train_idx: list[int] = []
    test_idx: list[int] = []
    for cls in range(ds.n_classes):
        members = np.nonzero(ds.labels == cls)[0]
        n = len(members)
        if n == 0:
            continue
        if n == 1:
            train_idx.extend(members.tolist())
            continue
        perm = rng.permutation(n)
        n_train = int(math.floor(n * spec.train_fraction + 0.5))
        n_train = min(max(n_train, 1), n - 1)
        shuffled = members[perm]
        train_idx.extend(shuffled[:n_train].tolist())
        test_idx.extend(shuffled[n_train:].tolist())
    train_idx.sort()
    test_idx.sort()
    return ds.subset(np.asarray(train_idx, dtype=np.int64)), ds.subset(
        np.asarray(test_idx, dtype=np.int64)
    )
