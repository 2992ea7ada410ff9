from __future__ import annotations

import math

import numpy as np
import pandas as pd
import pytest

import fixtures
from toric.errors import InputError, InvalidFan


# -- parsing ----------------------------------------------------------------------------


def test_every_shipped_fixture_loads():
    for path in sorted(fixtures.FIXTURES_DIR.glob("*.json")):
        assert fixtures.read_json(path) is not None


def test_parse_config_reports_the_offending_entry():
    with pytest.raises(InputError) as exc:
        fixtures.parse_config({"points": {"a": [0.0, 1.0], "b": [0.0, "x"]}})
    assert exc.value.field == "points.b[1]"
    with pytest.raises(InputError) as exc:
        fixtures.parse_config({"points": {"a": [0.0, 1.0], "b": [0.0]}})
    assert exc.value.field == "points.b"
    with pytest.raises(InputError) as exc:
        fixtures.parse_config({"points": {}})
    assert exc.value.field == "points"
    with pytest.raises(InputError) as exc:
        fixtures.parse_config({"points": {"a": [1.0]}, "affine": "yes"})
    assert exc.value.field == "affine"


def test_parse_config_keeps_label_order():
    config = fixtures.parse_config({"points": {"z": [2.0], "a": [0.0]}})
    assert config.labels == ("z", "a")


def test_bad_json_names_the_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"points": ', encoding="utf-8")
    with pytest.raises(InputError) as exc:
        fixtures.read_json(path)
    assert exc.value.field == "broken.json"
    assert "line 1" in str(exc.value)


def test_missing_file(tmp_path):
    with pytest.raises(InputError):
        fixtures.read_json(tmp_path / "absent.json")


def test_parse_fan_infers_dimension_and_closes_faces():
    fan = fixtures.parse_fan(fixtures.read_json(fixtures.fixture_path("orthant_2")))
    assert fan.dim == 2
    assert len(fan) == 4
    assert fan.labels[0] == "quadrant"


def test_parse_fan_rejects_overlaps():
    data = {"cones": [{"label": "a", "generators": [[1.0, 0.0], [0.0, 1.0]]}, {"label": "b", "generators": [[1.0, 1.0], [-1.0, 2.0]]}]}
    with pytest.raises(InvalidFan):
        fixtures.parse_fan(data)


def test_parse_fan_input_errors():
    with pytest.raises(InputError) as exc:
        fixtures.parse_fan({"cones": []})
    assert exc.value.field == "cones"
    with pytest.raises(InputError) as exc:
        fixtures.parse_fan({"cones": [{"generators": []}]})
    assert exc.value.field == "dim"
    with pytest.raises(InputError) as exc:
        fixtures.parse_fan({"dim": 2, "cones": [{"label": "x", "generators": [[1.0, 0.0]]}, {"label": "x", "generators": [[0.0, 1.0]]}]})
    assert exc.value.field == "cones"


def test_parse_values():
    labels = ("0", "1", "2")
    np.testing.assert_allclose(fixtures.parse_values({"2": 3, "0": 1, "1": 2}, labels, field="lift"), [1, 2, 3])
    np.testing.assert_allclose(fixtures.parse_values([1, 2, 3], labels, field="lift"), [1, 2, 3])
    with pytest.raises(InputError) as exc:
        fixtures.parse_values({"0": 1, "1": 2, "2": 3, "3": 4}, labels, field="lift")
    assert "unknown labels" in str(exc.value)
    with pytest.raises(InputError):
        fixtures.parse_values({"0": True, "1": 2, "2": 3}, labels, field="lift")


def test_parse_vector_and_schedule():
    np.testing.assert_allclose(fixtures.parse_vector("0, -1,0", field="direction"), [0.0, -1.0, 0.0])
    with pytest.raises(InputError):
        fixtures.parse_vector("1,two", field="direction")
    with pytest.raises(InputError):
        fixtures.parse_vector("1,nan", field="direction")
    assert fixtures.parse_schedule("1:40:1") == [float(s) for s in range(1, 41)]
    assert fixtures.parse_schedule("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert fixtures.parse_schedule("2,4,8") == [2.0, 4.0, 8.0]
    with pytest.raises(InputError):
        fixtures.parse_schedule("1:5")
    with pytest.raises(InputError):
        fixtures.parse_schedule("5:1:1")


# -- writing ----------------------------------------------------------------------------


def test_json_safe():
    payload = {"nan": math.nan, "array": np.array([1, 2]), "labels": frozenset({"b", "a"}), 3: np.float64(0.5)}
    assert fixtures.json_safe(payload) == {"nan": None, "array": [1, 2], "labels": ["a", "b"], "3": 0.5}


def test_dumps_is_deterministic_and_exact():
    text = fixtures.dumps({"x": 0.1, "whole": 1.0, "vec": [1.0, 2.5], "rows": [[1, 2]], "empty": {}})
    assert text == (
        "{\n"
        '  "x": 0.10000000000000001,\n'
        '  "whole": 1.0,\n'
        '  "vec": [1.0, 2.5],\n'
        '  "rows": [\n'
        "    [1, 2]\n"
        "  ],\n"
        '  "empty": {}\n'
        "}\n"
    )
    assert float(text.split('"x": ')[1].split(",")[0]) == 0.1


def test_shipped_fixtures_are_in_canonical_form():
    for path in sorted(fixtures.FIXTURES_DIR.glob("*.json")):
        text = path.read_text(encoding="utf-8")
        assert fixtures.dumps(fixtures.read_json(path)) == text, path.name


def test_write_atomic_replaces_the_file(tmp_path):
    target = tmp_path / "out" / "result.json"
    fixtures.write_json(target, {"a": 1})
    fixtures.write_json(target, {"a": 2})
    assert fixtures.read_json(target) == {"a": 2}
    assert [p.name for p in target.parent.iterdir()] == ["result.json"]


def test_write_csv(tmp_path):
    path = fixtures.write_csv(tmp_path / "cloud.csv", pd.DataFrame({"0": [0.1], "1": [0.9]}))
    assert path.read_text(encoding="utf-8").splitlines() == ["0,1", "0.10000000000000001,0.90000000000000002"]
