import enum
import json
import math
from dataclasses import dataclass

import numpy as np
import pytest

from torusjets.report_io import dumps_json, parse_jet_table, parse_potential, parse_side


def test_floats_roundtrip_bit_exact():
    values = [math.pi, 1 / 3, 1e-300, -0.0, 2**53 + 1.0, 6.02e23, 5e-324]
    text = dumps_json({"values": values})
    back = json.loads(text)["values"]
    assert all(a == b for a, b in zip(back, values))


def test_numpy_and_enum_encoding():
    class Kind(enum.Enum):
        SPACE_LIKE = "SpaceLike"

    doc = {
        "flag": np.bool_(True),
        "count": np.int64(7),
        "x": np.float64(0.1),
        "arr": np.arange(3.0),
        "kind": Kind.SPACE_LIKE,
        "none": None,
        "empty_list": [],
        "empty_map": {},
    }
    back = json.loads(dumps_json(doc))
    assert back == {
        "flag": True,
        "count": 7,
        "x": 0.1,
        "arr": [0.0, 1.0, 2.0],
        "kind": "SpaceLike",
        "none": None,
        "empty_list": [],
        "empty_map": {},
    }


def test_dataclass_and_int_keys():
    @dataclass
    class Row:
        label: str
        weight: float

    text = dumps_json({"rows": [Row("a", 1.5)], "by_order": {2: [1.0], 4: [0.5]}})
    back = json.loads(text)
    assert back["rows"] == [{"label": "a", "weight": 1.5}]
    assert back["by_order"] == {"2": [1.0], "4": [0.5]}


def test_non_finite_rejected():
    with pytest.raises(ValueError, match="finite"):
        dumps_json({"x": math.inf})
    with pytest.raises(ValueError, match="finite"):
        dumps_json({"x": math.nan})


def test_unserializable_rejected():
    with pytest.raises(TypeError):
        dumps_json({"x": object()})


def test_parse_potential():
    p = parse_potential({"terms": [[0.25, 2, 0], [-0.25, 0, 2]]})
    assert p.terms == ((0.25, 2, 0), (-0.25, 0, 2))
    with pytest.raises(ValueError, match="terms"):
        parse_potential({"powers": []})
    with pytest.raises(ValueError, match="coeff"):
        parse_potential({"terms": [[1.0, 2]]})
    with pytest.raises(ValueError, match="even"):
        parse_potential({"terms": [[1.0, 3, 0]]})


def test_parse_jet_table():
    jets = parse_jet_table({"jets": {"2": [0.1, -0.1], "4": [1, 2, 3]}})
    assert sorted(jets) == [2, 4]
    assert np.array_equal(jets[2], [0.1, -0.1])
    assert np.array_equal(jets[4], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError, match="order"):
        parse_jet_table({"jets": {"two": [0.1, -0.1]}})
    with pytest.raises(ValueError, match="jets"):
        parse_jet_table({"jets": {}})


def test_parse_side():
    assert np.array_equal(parse_side(None, 4)[2], [0.0, 0.0])
    jets = parse_side({"jets": {"2": [0.2, -0.2]}}, 6)
    assert np.array_equal(jets[2], [0.2, -0.2])
    jets = parse_side({"terms": [[1.0, 2, 0]]}, 4)
    assert np.array_equal(jets[2], [1.0, 0.0])
    assert np.array_equal(jets[4], [-1.0 / 3.0, 0.0, 0.0])
    with pytest.raises(ValueError, match="object"):
        parse_side([1, 2, 3], 4)
