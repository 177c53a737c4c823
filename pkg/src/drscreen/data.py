"""Dataset container and file ingestion (LIBSVM text and dense CSV)."""

import csv
import io
from dataclasses import dataclass, field

import numpy as np


class DataError(ValueError):
    """Raised for malformed input files or inconsistent dataset options."""


class LibsvmParseError(DataError):
    pass


@dataclass
class RawSample:
    """One parsed LIBSVM line: label plus (1-based index, value) pairs."""

    label: float
    values: list


@dataclass
class Dataset:
    """Classification data with the intercept convention baked in.

    ``x`` is n x d dense with the last column identically one, ``y`` holds
    labels in {-1, +1}, and ``xcheck`` is ``diag(y) @ x`` (the sign-folded
    matrix every objective and rule is written against).
    """

    x: np.ndarray
    y: np.ndarray
    xcheck: np.ndarray = field(default=None)
    n_pos: int = field(default=None)
    has_intercept: bool = field(default=True)

    def __post_init__(self):
        self.x = np.ascontiguousarray(self.x, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)
        if self.x.ndim != 2 or self.y.ndim != 1 or self.x.shape[0] != self.y.shape[0]:
            raise DataError(
                f"inconsistent shapes: x {self.x.shape}, y {self.y.shape}"
            )
        if not np.all(np.isfinite(self.x)):
            raise DataError("feature matrix contains non-finite entries")
        if not np.all(np.isin(self.y, (-1.0, 1.0))):
            raise DataError("labels must be -1 or +1 after preparation")
        if self.has_intercept and not np.all(self.x[:, -1] == 1.0):
            raise DataError("last feature column must be the all-ones intercept")
        folded = np.ascontiguousarray(self.y[:, None] * self.x)
        if self.xcheck is not None and not np.array_equal(
            np.asarray(self.xcheck), folded
        ):
            raise DataError("xcheck rows must equal y_i * x_i rows")
        self.xcheck = folded
        self.n_pos = int(np.sum(self.y > 0))

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def d(self):
        return self.x.shape[1]

    @classmethod
    def from_features(cls, features, y):
        """Build a Dataset from a plain feature matrix, appending the intercept."""
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2:
            raise DataError("feature matrix must be 2-d")
        ones = np.ones((features.shape[0], 1))
        return cls(x=np.hstack([features, ones]), y=y)


def parse_libsvm(source):
    """Parse LIBSVM text (``<label> <idx>:<val> ...``) into RawSamples.

    ``#`` starts a comment.  Indices are 1-based and must be strictly
    increasing within a line; violations raise LibsvmParseError naming the
    line and token.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    samples = []
    for lineno, line in enumerate(source, start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        tokens = body.split()
        try:
            label = float(tokens[0])
        except ValueError:
            raise LibsvmParseError(
                f"non-numeric label {tokens[0]!r} at line {lineno}"
            ) from None
        values = []
        prev = 0
        for col, tok in enumerate(tokens[1:], start=2):
            idx_s, _, val_s = tok.partition(":")
            try:
                idx = int(idx_s)
                val = float(val_s)
            except ValueError:
                raise LibsvmParseError(
                    f"malformed token {tok!r} at line {lineno}, field {col}"
                ) from None
            if idx < 1:
                raise LibsvmParseError(
                    f"feature index {idx} < 1 at line {lineno}, field {col}"
                )
            if idx <= prev:
                raise LibsvmParseError(
                    f"non-increasing feature index at line {lineno}, field {col}"
                )
            if not np.isfinite(val):
                raise LibsvmParseError(
                    f"non-finite value at line {lineno}, field {col}"
                )
            values.append((idx, val))
            prev = idx
        samples.append(RawSample(label=label, values=values))
    return samples


def serialize_libsvm(samples):
    """Inverse of parse_libsvm, printing floats at 17 significant digits."""
    lines = []
    for s in samples:
        parts = [f"{s.label:.17g}"]
        parts.extend(f"{idx}:{val:.17g}" for idx, val in s.values)
        lines.append(" ".join(parts))
    return "\n".join(lines) + ("\n" if lines else "")


def prepare_dataset(samples, label_map=None, drop_zero_features=False, dims=None):
    """Densify parsed samples into a Dataset with the intercept appended.

    Missing indices are zeros.  ``label_map`` maps observed labels onto
    {-1, +1} and is required whenever labels are not already such.  With
    ``drop_zero_features`` every original feature column containing at
    least one zero entry is removed before the intercept is appended.
    """
    if not samples:
        raise DataError("empty input: no samples to prepare")
    max_idx = max((v[0] for s in samples for v in s.values), default=0)
    if dims is not None:
        if max_idx > dims:
            raise DataError(
                f"observed feature index {max_idx} exceeds declared dims {dims}"
            )
        max_idx = dims
    if max_idx == 0:
        raise DataError("no feature indices observed and dims not given")
    n = len(samples)
    feats = np.zeros((n, max_idx))
    labels = np.empty(n)
    for i, s in enumerate(samples):
        lab = s.label
        if label_map is not None:
            if lab not in label_map:
                raise DataError(f"label {lab!r} not covered by label_map")
            lab = label_map[lab]
        if lab not in (-1.0, 1.0):
            raise DataError(
                f"label {lab!r} is not -1/+1; provide a label_map"
            )
        labels[i] = lab
        for idx, val in s.values:
            feats[i, idx - 1] = val
    if drop_zero_features:
        keep = np.all(feats != 0.0, axis=0)
        feats = feats[:, keep]
    return Dataset.from_features(feats, labels)


def load_dense_features(source, label_column="label"):
    """Read a rectangular numeric CSV with a header into a Dataset.

    All non-label columns become features (in header order); the label
    column must hold -1/+1.  The intercept column is appended.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty dataset: no header row") from None
    header = [h.strip() for h in header]
    if label_column not in header:
        raise DataError(f"label column {label_column!r} not in header {header}")
    label_pos = header.index(label_column)
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise DataError(
                f"ragged row at line {lineno}: {len(row)} fields, "
                f"expected {len(header)}"
            )
        try:
            rows.append([float(tok) for tok in row])
        except ValueError:
            raise DataError(f"non-numeric field at line {lineno}") from None
    if not rows:
        raise DataError("empty dataset: header only")
    arr = np.asarray(rows)
    y = arr[:, label_pos]
    feats = np.delete(arr, label_pos, axis=1)
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise DataError("dense CSV labels must be -1 or +1")
    return Dataset.from_features(feats, y)


def write_dense_csv(dataset, stream):
    """Emit a Dataset (without the intercept column) as load_dense_features input."""
    k = dataset.d - 1
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow([f"f{j + 1}" for j in range(k)] + ["label"])
    for i in range(dataset.n):
        row = [f"{v:.17g}" for v in dataset.x[i, :k]]
        row.append(f"{dataset.y[i]:.17g}")
        writer.writerow(row)
