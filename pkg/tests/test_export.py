import json
import os

import numpy as np

from h3mag import export


def test_fmt_round_trips():
    for v in (0.1, 1 / 3, -2.5e-300, 1e22, 7.0):
        assert float(export.fmt(v)) == v
    assert export.fmt(float("nan")) == "nan"


def test_csv_text_layout():
    text = export.csv_text(("t", "x"), np.array([[0.0, 1.5], [0.5, -2.0]]))
    assert text == "t,x\n0,1.5\n0.5,-2\n"


def test_json_text_is_sorted():
    text = export.json_text({"b": 1, "a": [1.0, 2]})
    assert text.index('"a"') < text.index('"b"') and text.endswith("\n")
    doc = json.loads(export.rows_json("curve", ("t",), [[1.0]], note="x"))
    assert doc == {"schema_version": 1, "kind": "curve", "columns": ["t"], "rows": [[1.0]],
                   "note": "x"}


def test_write_atomic_replaces_and_leaves_no_temp(tmp_path):
    path = tmp_path / "out.csv"
    export.write_atomic(path, "old\n")
    export.write_atomic(path, "new\n")
    assert path.read_bytes() == b"new\n"
    assert os.listdir(tmp_path) == ["out.csv"]


def test_write_atomic_stdout(capsys):
    export.write_atomic("-", "hello\n")
    export.write_atomic(None, "again\n")
    assert capsys.readouterr().out == "hello\nagain\n"
