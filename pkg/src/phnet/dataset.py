"""Water-quality records: schema, CSV I/O, min-max scaling and the 70/30 split."""

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .exceptions import (
    EmptyDataset,
    ParseError,
    RangeError,
    SchemaMismatch,
    ShapeError,
    TooFewSamples,
)

TARGET = "pH"
PH_LIMITS = (0.0, 14.0)
ID_COLUMNS = ("location", "seq")
TRAIN_FRACTION_TENTHS = 7

# name -> plausibility range in native units
DEFAULT_PARAMETERS = {
    "iron": (0.0, 10.0),  # mg/L
    "chlorine_total": (0.0, 10.0),  # mg/L
    "chlorine_free": (0.0, 10.0),  # mg/L
    "calcium": (0.0, 500.0),  # mg/L
    "magnesium": (0.0, 300.0),  # mg/L
    "hardness": (0.0, 1000.0),  # mg/L as CaCO3
    "total_suspended_solids": (0.0, 2000.0),  # mg/L
    "sulfate": (0.0, 1000.0),  # mg/L
    "turbidity": (0.0, 1000.0),  # NTU
    "pH": PH_LIMITS,
    "electrical_conductivity": (0.0, 5000.0),  # uS/cm
    "total_dissolved_solids": (0.0, 3000.0),  # mg/L
    "salinity": (0.0, 40.0),  # ppt
    "temperature": (0.0, 45.0),  # degC
    "dissolved_oxygen": (0.0, 20.0),  # mg/L
    # two unnamed slots make up the 17 model variables
    "param16": (-math.inf, math.inf),
    "param17": (-math.inf, math.inf),
}


@dataclass(frozen=True)
class ParameterSchema:
    """Ordered parameter names with per-parameter plausibility ranges."""

    names: tuple
    ranges: tuple = None
    target: str = TARGET

    def __post_init__(self):
        names = tuple(str(n) for n in self.names)
        if not names:
            raise SchemaMismatch("schema has no parameters")
        if len(set(names)) != len(names):
            raise SchemaMismatch(f"duplicate parameter names in schema: {names}")
        if any(n in ID_COLUMNS for n in names):
            raise SchemaMismatch(f"parameter names may not reuse {ID_COLUMNS}")
        if self.target not in names:
            raise SchemaMismatch(f"target {self.target!r} is not in the schema")
        ranges = self.ranges
        if ranges is None:
            ranges = tuple((-math.inf, math.inf) for _ in names)
        ranges = tuple((float(lo), float(hi)) for lo, hi in ranges)
        if len(ranges) != len(names):
            raise SchemaMismatch("one range per parameter is required")
        for n, (lo, hi) in zip(names, ranges):
            if lo > hi:
                raise SchemaMismatch(f"range of {n!r} has min > max")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "ranges", ranges)

    @property
    def count(self):
        return len(self.names)

    def index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise SchemaMismatch(f"unknown parameter {name!r}") from None

    def range_of(self, name):
        return self.ranges[self.index(name)]

    def input_names(self, include_target=False):
        if include_target:
            return self.names
        return tuple(n for n in self.names if n != self.target)


def default_schema():
    return ParameterSchema(
        names=tuple(DEFAULT_PARAMETERS), ranges=tuple(DEFAULT_PARAMETERS.values())
    )


def load_schema(path):
    """Read a schema file: one ``name`` or ``name,min,max`` per line.

    Blank lines and ``#`` comments are ignored.
    """
    names, ranges = [], []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) == 1:
            lo, hi = -math.inf, math.inf
        elif len(parts) == 3:
            try:
                lo, hi = float(parts[1]), float(parts[2])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: bad range {raw!r}", row=lineno) from None
        else:
            raise ParseError(f"{path}:{lineno}: expected name or name,min,max", row=lineno)
        names.append(parts[0])
        ranges.append((lo, hi))
    return ParameterSchema(names=tuple(names), ranges=tuple(ranges))


def write_schema(schema, path):
    lines = [f"{n},{lo!r},{hi!r}" for n, (lo, hi) in zip(schema.names, schema.ranges)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class Sample:
    location_id: int
    sequence_index: int
    values: tuple


@dataclass(frozen=True)
class Dataset:
    schema: ParameterSchema
    samples: tuple = field(default_factory=tuple)

    def __post_init__(self):
        samples = tuple(self.samples)
        lo, hi = PH_LIMITS
        t = self.schema.index(self.schema.target)
        for i, s in enumerate(samples):
            if len(s.values) != self.schema.count:
                raise ShapeError(
                    f"sample {i} has {len(s.values)} values, schema has {self.schema.count}"
                )
            if not lo <= s.values[t] <= hi:
                raise RangeError(f"sample {i}: pH {s.values[t]!r} outside 0-14")
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return len(self.samples)

    @classmethod
    def from_arrays(cls, schema, values, locations, seqs=None):
        values = np.asarray(values, dtype=np.float64)
        if seqs is None:
            seqs = _sequence_by_location(locations)
        samples = tuple(
            Sample(int(loc), int(seq), tuple(float(v) for v in row))
            for loc, seq, row in zip(locations, seqs, values)
        )
        return cls(schema, samples)

    @property
    def values(self):
        """All parameter values as an (n_samples, n_parameters) array."""
        if not self.samples:
            return np.empty((0, self.schema.count))
        return np.array([s.values for s in self.samples], dtype=np.float64)

    @property
    def locations(self):
        return np.array([s.location_id for s in self.samples], dtype=int)

    def column(self, name):
        return self.values[:, self.schema.index(name)]

    def features(self, include_target=False):
        """Split into model inputs ``X`` and the target vector ``y``."""
        cols = [self.schema.index(n) for n in self.schema.input_names(include_target)]
        v = self.values
        return v[:, cols], v[:, self.schema.index(self.schema.target)]

    def subset(self, indices):
        return Dataset(self.schema, tuple(self.samples[i] for i in indices))

    def by_location(self):
        """Map of location id to the samples recorded there, in file order."""
        groups = {}
        for i, s in enumerate(self.samples):
            groups.setdefault(s.location_id, []).append(i)
        return {loc: self.subset(idx) for loc, idx in sorted(groups.items())}


def _sequence_by_location(locations):
    seen = {}
    seqs = []
    for loc in locations:
        seqs.append(seen.get(int(loc), 0))
        seen[int(loc)] = seqs[-1] + 1
    return seqs


def _parse_int(text, row, column):
    try:
        return int(text.strip())
    except ValueError:
        raise ParseError(
            f"row {row}, column {column!r}: expected an integer, got {text!r}",
            row=row, column=column,
        ) from None


def _parse_float(text, row, column):
    try:
        v = float(text.strip())
    except ValueError:
        v = math.nan
    if not math.isfinite(v):
        raise ParseError(
            f"row {row}, column {column!r}: expected a number, got {text!r}",
            row=row, column=column,
        )
    return v


def load_csv(path, schema=None):
    """Read a dataset CSV.

    The header must hold ``location``, ``seq`` and every schema parameter, in
    any order. Rows keep file order. A header-only file gives an empty dataset.
    """
    schema = schema or default_schema()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaMismatch(f"{path}: file is empty (no header row)")
        header = [h.strip() for h in header]
        required = list(ID_COLUMNS) + list(schema.names)
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaMismatch(f"{path}: missing column(s) {missing}")
        pos = {c: header.index(c) for c in required}
        samples = []
        for row_no, row in enumerate(reader, 1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"row {row_no}: {len(row)} cells, header has {len(header)}", row=row_no
                )
            loc = _parse_int(row[pos["location"]], row_no, "location")
            seq = _parse_int(row[pos["seq"]], row_no, "seq")
            if seq < 0:
                raise ParseError(f"row {row_no}: negative seq {seq}", row=row_no, column="seq")
            vals = tuple(_parse_float(row[pos[n]], row_no, n) for n in schema.names)
            ph = vals[schema.index(schema.target)]
            if not PH_LIMITS[0] <= ph <= PH_LIMITS[1]:
                raise RangeError(f"row {row_no}: pH {ph!r} outside 0-14")
            samples.append(Sample(loc, seq, vals))
    return Dataset(schema, tuple(samples))


def write_csv(dataset, path, extra_columns=None):
    """Write ``dataset`` in the CSV layout read by :func:`load_csv`.

    ``extra_columns`` maps additional header names to per-row values.
    """
    extra_columns = extra_columns or {}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(ID_COLUMNS) + list(dataset.schema.names) + list(extra_columns))
        for i, s in enumerate(dataset.samples):
            extras = [_fmt(col[i]) for col in extra_columns.values()]
            w.writerow([s.location_id, s.sequence_index] + [repr(v) for v in s.values] + extras)


def _fmt(v):
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


class MinMaxNormalizer(TransformerMixin, BaseEstimator):
    """Per-feature affine map of the fitted [min, max] onto [-1, 1].

    Constant features are flagged in ``degenerate_`` and map to 0. Values
    outside the fitted range extrapolate linearly; nothing is clipped.
    """

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=np.float64)
        self.data_min_ = X.min(axis=0)
        self.data_max_ = X.max(axis=0)
        self.degenerate_ = self.data_max_ == self.data_min_
        return self

    @classmethod
    def from_bounds(cls, data_min, data_max):
        n = cls()
        n.data_min_ = np.asarray(data_min, dtype=np.float64).copy()
        n.data_max_ = np.asarray(data_max, dtype=np.float64).copy()
        if np.any(n.data_max_ < n.data_min_):
            raise ValueError("normalizer max < min")
        n.degenerate_ = n.data_max_ == n.data_min_
        n.n_features_in_ = n.data_min_.shape[0]
        return n

    @property
    def half_range_(self):
        half = (self.data_max_ - self.data_min_) / 2.0
        return np.where(self.degenerate_, 1.0, half)

    @property
    def center_(self):
        return (self.data_max_ + self.data_min_) / 2.0

    def _check(self, X):
        check_is_fitted(self, "data_min_")
        X = np.asarray(X)
        shape = X.shape
        if len(shape) != 2:
            raise ShapeError(f"Expected a 2-D array, got shape {shape}. Reshape your data.")
        if shape[1] != self.n_features_in_:
            raise ShapeError(
                f"X has {shape[1]} features, but {type(self).__name__} "
                f"is expecting {self.n_features_in_} features as input"
            )
        return validate_data(self, X, reset=False, dtype=np.float64, ensure_min_samples=0)

    def transform(self, X):
        X = self._check(X)
        Z = (X - self.data_min_) / self.half_range_ - 1.0
        return np.where(self.degenerate_, 0.0, Z)

    def inverse_transform(self, Z):
        Z = self._check(Z)
        X = (Z + 1.0) * self.half_range_ + self.data_min_
        return np.where(self.degenerate_, self.data_min_, X)


def fit_normalizer(dataset):
    """Fit a normalizer over every schema parameter of ``dataset``."""
    if len(dataset) == 0:
        raise EmptyDataset("cannot fit a normalizer on an empty dataset")
    return MinMaxNormalizer().fit(dataset.values)


def normalize(normalizer, x):
    """Normalize one feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError(f"expected a 1-D feature vector, got shape {x.shape}")
    return normalizer.transform(x[None, :])[0]


def train_size(n):
    """``round(0.7 n)`` with halves rounded up, kept within [1, n - 1]."""
    k = (TRAIN_FRACTION_TENTHS * n + 5) // 10
    return min(max(k, 1), n - 1)


def split_indices(n, seed):
    if n < 4:
        raise TooFewSamples(f"need at least 4 samples to split, got {n}")
    perm = np.random.default_rng(seed).permutation(n)
    k = train_size(n)
    return perm[:k], perm[k:]


def split_70_30(dataset, seed):
    """Seeded shuffle, then 70% train and 30% test."""
    train_idx, test_idx = split_indices(len(dataset), seed)
    return dataset.subset(train_idx), dataset.subset(test_idx)
