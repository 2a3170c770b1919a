"""Dataset-aware pH model and its on-disk format.

:class:`PhModel` binds a :class:`~phnet.estimator.MLPRegressorLM` to a
parameter schema: it selects the input columns, keeps the target out of the
inputs unless asked otherwise, and reads/writes the JSON model file. Floats
are written with ``repr`` so every weight survives a save/load unchanged.
"""

import json
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import MinMaxNormalizer, ParameterSchema
from .estimator import MLPRegressorLM
from .exceptions import EmptyDataset, ModelFormatError, SchemaMismatch
from .network import unpack

FORMAT = "phnet-model"
FORMAT_VERSION = 1


class PhModel:
    def __init__(self, schema, regressor=None, include_target_input=False):
        self.schema = schema
        self.regressor = regressor if regressor is not None else MLPRegressorLM()
        self.include_target_input = include_target_input
        self.training_summary = None

    @property
    def input_names(self):
        return self.schema.input_names(self.include_target_input)

    def check_schema(self, dataset):
        if dataset.schema.names != self.schema.names:
            raise SchemaMismatch(
                f"dataset parameters {list(dataset.schema.names)} do not match "
                f"model parameters {list(self.schema.names)}"
            )

    def features(self, dataset):
        self.check_schema(dataset)
        return dataset.features(self.include_target_input)

    def fit(self, dataset):
        if len(dataset) == 0:
            raise EmptyDataset("training set is empty")
        X, y = self.features(dataset)
        self.regressor.fit(X, y)
        return self

    def predict(self, dataset):
        X, _ = self.features(dataset)
        if X.shape[0] == 0:
            return np.empty(0)
        return self.regressor.predict(X)

    def range_warnings(self, dataset):
        """Per-row lists of flags for inputs outside the schema or training range.

        ``range:<name>`` marks a value outside the schema's plausibility
        range, ``extrapolated:<name>`` one outside the span seen in training.
        """
        X, _ = self.features(dataset)
        lo_s = np.array([self.schema.range_of(n)[0] for n in self.input_names])
        hi_s = np.array([self.schema.range_of(n)[1] for n in self.input_names])
        norm = self.regressor.input_normalizer_
        out = []
        for row in X:
            flags = [f"range:{n}" for n, v, lo, hi in zip(self.input_names, row, lo_s, hi_s)
                     if not lo <= v <= hi]
            flags += [
                f"extrapolated:{n}"
                for n, v, lo, hi in zip(self.input_names, row, norm.data_min_, norm.data_max_)
                if not lo <= v <= hi
            ]
            out.append(flags)
        return out

    def to_dict(self):
        reg = self.regressor
        net = reg.network_
        report = getattr(reg, "report_", None)
        training = self.training_summary
        if report is not None:
            training = {
                "termination": report.termination.value,
                "epochs_run": report.epochs_run,
                "final_train_mse": report.final_train_mse,
            }
        return {
            "format": FORMAT,
            "format_version": FORMAT_VERSION,
            "tool_version": __version__,
            "schema": {
                "names": list(self.schema.names),
                "ranges": [list(r) for r in self.schema.ranges],
                "target": self.schema.target,
            },
            "include_target_input": self.include_target_input,
            "input_names": list(self.input_names),
            "n_in": net.n_in,
            "n_hidden": net.n_hidden,
            "n_out": net.n_out,
            "input_normalizer": {
                "min": reg.input_normalizer_.data_min_.tolist(),
                "max": reg.input_normalizer_.data_max_.tolist(),
            },
            "target_normalizer": {
                "min": reg.target_normalizer_.data_min_.tolist(),
                "max": reg.target_normalizer_.data_max_.tolist(),
            },
            "params": net.pack().tolist(),
            "seed": reg.random_state,
            "estimator_params": reg.get_params(),
            "training": training,
        }

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def from_dict(cls, d):
        try:
            if d.get("format") != FORMAT:
                raise ModelFormatError(f"not a model file (format={d.get('format')!r})")
            if d.get("format_version") != FORMAT_VERSION:
                raise ModelFormatError(f"unsupported format_version {d.get('format_version')!r}")
            s = d["schema"]
            schema = ParameterSchema(
                names=tuple(s["names"]),
                ranges=tuple(tuple(r) for r in s["ranges"]),
                target=s["target"],
            )
            reg = MLPRegressorLM(**d["estimator_params"])
            n_in, n_hidden, n_out = int(d["n_in"]), int(d["n_hidden"]), int(d["n_out"])
            net = unpack(np.array(d["params"], dtype=np.float64), n_in, n_hidden, n_out)
            reg.network_ = net
            reg.report_ = None
            reg.input_normalizer_ = MinMaxNormalizer.from_bounds(
                d["input_normalizer"]["min"], d["input_normalizer"]["max"]
            )
            reg.target_normalizer_ = MinMaxNormalizer.from_bounds(
                d["target_normalizer"]["min"], d["target_normalizer"]["max"]
            )
            reg.n_features_in_ = n_in
            reg.y_ndim_ = 1 if n_out == 1 else 2
            model = cls(schema, reg, bool(d["include_target_input"]))
            model.training_summary = d.get("training")
            if list(model.input_names) != list(d["input_names"]) or len(model.input_names) != n_in:
                raise ModelFormatError("input_names disagree with schema and n_in")
            if reg.input_normalizer_.n_features_in_ != n_in or reg.target_normalizer_.n_features_in_ != n_out:
                raise ModelFormatError("normalizer sizes disagree with network shape")
        except ModelFormatError:
            raise
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ModelFormatError(f"invalid model file: {type(exc).__name__}: {exc}") from None
        return model

    @classmethod
    def load(cls, path):
        try:
            d = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: not valid JSON ({exc})") from None
        if not isinstance(d, dict):
            raise ModelFormatError(f"{path}: top level is not an object")
        return cls.from_dict(d)
