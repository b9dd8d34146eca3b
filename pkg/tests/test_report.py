import json
import math

import numpy as np

from ellislab import report


def test_normalize_rounds_and_converts():
    doc = report.normalize({"a": np.float64(1 / 3), "b": np.int64(4), "c": [np.bool_(True), math.inf, math.nan], 5: (1.0,)})
    assert doc == {"a": 0.333333333333, "b": 4, "c": [True, "inf", "nan"], "5": [1.0]}


def test_dumps_is_stable():
    a = report.dumps({"y": 1, "x": [0.1 + 0.2]})
    b = report.dumps({"x": [0.30000000000000004], "y": 1})
    assert a == b
    assert json.loads(a) == {"x": [0.3], "y": 1}


def test_csv_and_json_files(tmp_path):
    p = report.write_csv(tmp_path / "sub" / "t.csv", ["t", "d"], [(0, 0.5), (1, 1 / 3)])
    assert p.read_text().splitlines() == ["t,d", "0,0.5", "1,0.333333333333"]
    j = report.write_json(tmp_path / "r.json", report.envelope("detect", {}, {"verdict": {"property": "p", "outcome": "holds"}}))
    doc = report.load_json(j)
    assert doc["schema_version"] == "1"
    assert report.render(doc).startswith("p: holds")


def test_render_theorems_summary():
    result = {"summary": {"pass": 1, "fail": 0, "inconclusive": 0},
              "checks": [{"id": "T-x", "outcome": "pass", "title": "demo", "legs": [{"match": True}], "notes": []}]}
    text = report.render(report.envelope("theorems", {}, result))
    assert "T-x" in text and "pass 1  fail 0  inconclusive 0" in text
