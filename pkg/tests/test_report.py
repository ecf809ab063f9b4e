import json
import math

import numpy as np
import pytest

from harmcone.report import (Table, fmt_value, json_value, render_csv, render_json, render_text,
                             write_matrix, write_series)


@pytest.mark.parametrize("value, text", [
    (1 / 3, "0.333333333333"), (2.0, "2"), (0.0, "0"), (-0.0, "0"), (1e-20, "1e-20"),
    (math.inf, "inf"), (-math.inf, "-inf"), (math.nan, "nan"), (True, "true"), (np.False_, "false"),
    (np.int64(7), "7"), (None, ""), ("x", "x"),
])
def test_fmt_value(value, text):
    assert fmt_value(value) == text


def test_json_value_is_12_digits_and_finite():
    assert json_value(1 / 3) == 0.333333333333
    assert json_value(math.inf) == "inf"
    assert json_value(np.float64(2.5)) == 2.5


def test_table_rejects_wrong_width():
    t = Table("t", ["a", "b"])
    with pytest.raises(ValueError):
        t.add(1)


def test_renderers():
    t = Table("t", ["name", "value"], title="demo")
    t.add("x, y", 0.1)
    t.add("z", math.inf)
    assert render_csv(t) == 'name,value\n"x, y",0.1\nz,inf\n'
    text = render_text([t])
    assert text.splitlines()[0] == "demo" and "0.1" in text
    doc = json.loads(render_json("cmd", [t], {"n": 2}))
    assert doc == {"command": "cmd", "meta": {"n": 2},
                   "tables": {"t": [{"name": "x, y", "value": 0.1}, {"name": "z", "value": "inf"}]}}


def test_series_and_matrix_files(tmp_path):
    write_series(tmp_path / "s.txt", ["r", "v"], [[1.0, 2.0], [0.5, 0.25]])
    assert (tmp_path / "s.txt").read_text() == "# r v\n1 0.5\n2 0.25\n"
    write_matrix(tmp_path / "m.txt", [0.0, 1.0], [0.0, 3.0], [[1, 2], [3, 4.5]])
    lines = (tmp_path / "m.txt").read_text().splitlines()
    assert lines == ["# r: 0 1", "# theta: 0 3", "1 2", "3 4.5"]
