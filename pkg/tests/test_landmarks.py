import json

import numpy as np
import pytest

from orbitfit.errors import InvalidInputError, ParseError
from orbitfit.geometry import LandmarkSet, load_landmarks, save_landmarks


def write_markups(path, points):
    doc = {
        "markups": [
            {"controlPoints": [{"label": k, "position": v} for k, v in points]}
        ]
    }
    path.write_text(json.dumps(doc))


def test_markups_json_three_points(tmp_path):
    path = tmp_path / "lm.mrk.json"
    write_markups(path, [("a", [1, 2, 3]), ("b", [4, 5, 6]), ("c", [7, 8, 9])])
    lm = load_landmarks(path)
    assert lm.labels == ["a", "b", "c"]
    assert np.array_equal(lm.get("b"), [4, 5, 6])


def test_fcsv_with_comment_headers(tmp_path):
    path = tmp_path / "lm.fcsv"
    path.write_text(
        "# Markups fiducial file version = 4.11\n"
        "# CoordinateSystem = RAS\n"
        "# columns = id,x,y,z,ow,ox,oy,oz,vis,sel,lock,label,desc,associatedNodeID\n"
        "1,10.0,20.0,30.0,0,0,0,1,1,1,0,stop,,\n"
        "2,-1.5,2.5,3.5,0,0,0,1,1,1,0,rim,,\n"
    )
    lm = load_landmarks(path)
    assert lm.labels == ["stop", "rim"]
    assert np.array_equal(lm.get("stop"), [10.0, 20.0, 30.0])


def test_duplicate_labels_rejected(tmp_path):
    path = tmp_path / "dup.mrk.json"
    write_markups(path, [("stop", [0, 0, 0]), ("stop", [1, 1, 1])])
    with pytest.raises(InvalidInputError, match="duplicate"):
        load_landmarks(path)


def test_missing_position_is_parse_error(tmp_path):
    path = tmp_path / "bad.mrk.json"
    doc = {"markups": [{"controlPoints": [{"label": "a"}]}]}
    path.write_text(json.dumps(doc))
    with pytest.raises(ParseError):
        load_landmarks(path)


def test_matched_uses_labels_not_order():
    a = LandmarkSet([("x", [0, 0, 0]), ("y", [1, 0, 0]), ("z", [0, 1, 0])])
    b = LandmarkSet([("z", [10, 11, 12]), ("x", [1, 2, 3]), ("y", [4, 5, 6])])
    src, dst = a.matched(b)
    assert np.array_equal(dst[0], [1, 2, 3])   # x
    assert np.array_equal(dst[2], [10, 11, 12])  # z
    assert len(src) == 3


def test_save_load_roundtrip(tmp_path):
    lm = LandmarkSet([("a", [0.1, 0.2, 0.3]), ("b", [-1.0, 2.0, 33.0])])
    path = tmp_path / "lm.mrk.json"
    save_landmarks(lm, path)
    again = load_landmarks(path)
    assert again.labels == lm.labels
    assert np.array_equal(again.positions(), lm.positions())
