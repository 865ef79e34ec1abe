import json

import numpy as np
import pytest

from schema_util import validate
from qdiscord.jsonio import (
    InputFileError, ReportBundle, load_matrix, load_state, matrix_from_json, matrix_to_json,
    to_jsonable,
)
from qdiscord.sampling import random_density
from qdiscord.states import StateError


def test_roundtrip(tmp_path):
    m = random_density(4, np.random.default_rng(0))
    obj = matrix_to_json(m, (2, 2))
    validate(obj, "matrix")
    p = tmp_path / "m.json"
    p.write_text(json.dumps(obj))
    back, dims = load_matrix(p)
    assert np.array_equal(back, m)
    assert dims == [2, 2]


def test_dims_key(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(matrix_to_json(np.eye(6) / 6, (2, 3))))
    assert load_state(p).dims == (2, 3)


def test_non_square_total_needs_dims(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(matrix_to_json(np.eye(6) / 6)))
    with pytest.raises(InputFileError):
        load_state(p)


def test_invalid_state(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(matrix_to_json(np.diag([1.5, -0.5, 0, 0]))))
    with pytest.raises(StateError):
        load_state(p)


@pytest.mark.parametrize("text", ["not json", '{"dim": 2, "re": [[1]]}', '{"re": []}'])
def test_malformed(tmp_path, text):
    p = tmp_path / "s.json"
    p.write_text(text)
    with pytest.raises(InputFileError):
        load_state(p)


def test_missing_file(tmp_path):
    with pytest.raises(InputFileError):
        load_matrix(tmp_path / "absent.json")


def test_imag_optional():
    assert np.array_equal(matrix_from_json({"dim": 1, "re": [[1.0]]}), np.array([[1.0 + 0j]]))


def test_to_jsonable():
    out = to_jsonable({"a": np.float64(1 / 3), "b": np.array([1, 2]), "c": 1e-17, "d": -0.0,
                       "z": 1 + 2j, "ok": np.bool_(True)})
    assert out == {"a": 0.333333333, "b": [1, 2], "c": 0.0, "d": 0.0,
                   "z": {"re": 1.0, "im": 2.0}, "ok": True}
    json.dumps(out)


def test_bundle_deterministic():
    b = ReportBundle("x", {"k": 1}, {"v": np.pi}, ["label"])
    assert b.dumps() == b.dumps()
    assert json.loads(b.dumps())["results"]["v"] == 3.14159265
