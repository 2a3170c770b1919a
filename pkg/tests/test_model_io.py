import json

import numpy as np
import pytest

from phnet.dataset import split_70_30
from phnet.estimator import MLPRegressorLM
from phnet.exceptions import ModelFormatError, SchemaMismatch
from phnet.model import PhModel


@pytest.fixture(scope="module")
def model(loc1_data):
    train, _ = split_70_30(loc1_data, seed=5)
    return PhModel(loc1_data.schema, MLPRegressorLM(random_state=5)).fit(train)


def test_roundtrip_exact(model, loc1_data, tmp_path):
    model.save(tmp_path / "m.json")
    back = PhModel.load(tmp_path / "m.json")
    assert back.regressor.network_.pack().tobytes() == model.regressor.network_.pack().tobytes()
    np.testing.assert_array_equal(back.predict(loc1_data), model.predict(loc1_data))
    back.save(tmp_path / "again.json")
    assert (tmp_path / "m.json").read_bytes() == (tmp_path / "again.json").read_bytes()


def test_file_is_self_describing(model, tmp_path):
    model.save(tmp_path / "m.json")
    d = json.loads((tmp_path / "m.json").read_text())
    for key in ("schema", "n_in", "n_hidden", "n_out", "input_normalizer", "target_normalizer",
                "params", "seed", "estimator_params"):
        assert key in d
    assert d["n_in"] == 16 and d["n_hidden"] == 10 and d["n_out"] == 1
    assert len(d["params"]) == 10 * 16 + 10 + 10 + 1
    assert "pH" not in d["input_names"]


def test_include_target_input(loc1_data):
    m = PhModel(loc1_data.schema, MLPRegressorLM(max_epochs=3), include_target_input=True).fit(loc1_data)
    assert m.regressor.network_.n_in == 17
    assert "pH" in m.input_names


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("params"),
        lambda d: d.__setitem__("params", d["params"][:-1]),
        lambda d: d.__setitem__("format", "other"),
        lambda d: d.__setitem__("n_in", 3),
        lambda d: d["input_normalizer"].__setitem__("min", [0.0]),
        lambda d: d.__setitem__("estimator_params", {"bogus": 1}),
    ],
)
def test_corrupted_files(model, tmp_path, mutate):
    d = model.to_dict()
    mutate(d)
    (tmp_path / "bad.json").write_text(json.dumps(d))
    with pytest.raises(ModelFormatError):
        PhModel.load(tmp_path / "bad.json")


def test_truncated_file(model, tmp_path):
    model.save(tmp_path / "m.json")
    text = (tmp_path / "m.json").read_text()
    (tmp_path / "m.json").write_text(text[: len(text) // 2])
    with pytest.raises(ModelFormatError, match="JSON"):
        PhModel.load(tmp_path / "m.json")


def test_range_warnings(model, loc1_data):
    ds = loc1_data.subset(range(3))
    vals = ds.values
    t = loc1_data.schema.index("temperature")
    vals[1, t] = 60.0
    from phnet.dataset import Dataset

    odd = Dataset.from_arrays(loc1_data.schema, vals, ds.locations)
    flags = model.range_warnings(odd)
    assert "range:temperature" in flags[1]
    assert "extrapolated:temperature" in flags[1]
    assert not any(f.startswith("range:") for f in flags[0])


def test_schema_mismatch(model):
    from phnet.dataset import Dataset, ParameterSchema

    with pytest.raises(SchemaMismatch):
        model.predict(Dataset.from_arrays(ParameterSchema(("pH",)), [[7.0]], [1]))
