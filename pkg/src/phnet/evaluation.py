"""Fit-quality measures and the observed/predicted exports used for plotting."""

import csv
from dataclasses import asdict, dataclass, field

import numpy as np

from .exceptions import DegenerateVariance, EmptyDataset, ShapeError
from .training import mse


def _paired(observed, predicted, min_len):
    o = np.asarray(observed, dtype=np.float64).ravel()
    p = np.asarray(predicted, dtype=np.float64).ravel()
    if o.shape != p.shape:
        raise ShapeError(f"length mismatch: {o.size} observed vs {p.size} predicted")
    if o.size < min_len:
        raise DegenerateVariance(f"need at least {min_len} points, got {o.size}")
    return o, p


def r_squared(observed, predicted):
    """Squared Pearson correlation between two series.

    A constant ``observed`` series raises DegenerateVariance; a constant
    ``predicted`` series carries no linear information and scores 0.
    """
    o, p = _paired(observed, predicted, 2)
    do = o - o.mean()
    dp = p - p.mean()
    so = do @ do
    if so == 0.0:
        raise DegenerateVariance("observed series is constant")
    sp = dp @ dp
    if sp == 0.0:
        return 0.0
    r = (do @ dp) / np.sqrt(so * sp)
    return float(min(r * r, 1.0))


def r2_determination(observed, predicted):
    """Coefficient of determination ``1 - SSE/SST`` (may be negative)."""
    o, p = _paired(observed, predicted, 2)
    sst = np.sum((o - o.mean()) ** 2)
    if sst == 0.0:
        raise DegenerateVariance("observed series is constant")
    return float(1.0 - np.sum((o - p) ** 2) / sst)


def summary_stats(dataset, parameter):
    """(mean, min, max) of one parameter, in native units."""
    col = dataset.column(parameter)
    if col.size == 0:
        raise EmptyDataset("summary of an empty dataset")
    return float(col.mean()), float(col.min()), float(col.max())


@dataclass
class EvalReport:
    scope: str
    n_samples: int
    mse_normalized: float
    mse_native: float
    r_squared: float
    r2_determination: float
    mean_observed: float
    mean_predicted: float
    range_observed: tuple
    pairs: list = field(repr=False, default_factory=list)
    notes: list = field(default_factory=list)

    def to_dict(self, with_pairs=False):
        d = asdict(self)
        d["range_observed"] = list(self.range_observed)
        if with_pairs:
            d["pairs"] = [list(p) for p in self.pairs]
        else:
            d.pop("pairs")
        return d


def evaluate(model, dataset, scope="all"):
    """Score a fitted :class:`~phnet.model.PhModel` on ``dataset``."""
    if len(dataset) == 0:
        raise EmptyDataset("cannot evaluate on an empty dataset")
    model.check_schema(dataset)
    X, y = model.features(dataset)
    reg = model.regressor
    z_obs = reg.target_normalizer_.transform(y[:, None]).ravel()
    z_pred = reg.predict_normalized(X).ravel()
    y_pred = reg.target_normalizer_.inverse_transform(z_pred[:, None]).ravel()

    notes = []
    try:
        r2 = r_squared(y, y_pred)
        r2d = r2_determination(y, y_pred)
    except DegenerateVariance as exc:
        r2 = r2d = None
        notes.append(f"DegenerateVariance: {exc}")
    return EvalReport(
        scope=scope,
        n_samples=len(y),
        mse_normalized=mse(z_pred, z_obs),
        mse_native=mse(y_pred, y),
        r_squared=r2,
        r2_determination=r2d,
        mean_observed=float(y.mean()),
        mean_predicted=float(y_pred.mean()),
        range_observed=(float(y.min()), float(y.max())),
        pairs=[(float(a), float(b)) for a, b in zip(y, y_pred)],
        notes=notes,
    )


def write_pairs_csv(report, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "observed_ph", "predicted_ph"])
        for i, (o, p) in enumerate(report.pairs):
            w.writerow([i, repr(o), repr(p)])


def write_scatter_csv(report, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["observed", "predicted"])
        for o, p in report.pairs:
            w.writerow([repr(o), repr(p)])
