import json

import numpy as np
import pytest

from shapescore.cluster import TetraComplex
from shapescore.errors import DimensionError, InputError, ParseError
from shapescore.io import ingest, load_surface, parse_csv


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_csv_with_header(tmp_path):
    cloud = ingest(write(tmp_path, "a.csv", "x,y\n0,0\n1,0\n0,1\n"), "csv")
    assert len(cloud) == 3 and cloud.dim == 2
    assert cloud.indices == [(0,), (1,), (2,)]


def test_csv_without_header_three_columns():
    cloud = parse_csv("0,0,0\n1,0,0\n0,1,0\n0,0,1\n")
    assert cloud.dim == 3 and len(cloud) == 4


def test_csv_duplicates_recorded():
    cloud = parse_csv("x,y\n0,0\n1,0\n0,0\n0,1\n")
    assert len(cloud) == 3
    assert cloud.duplicate_map() == {2: 0}


def test_csv_ragged_row_names_line():
    with pytest.raises(ParseError) as info:
        parse_csv("x,y\n0,0\n1,0,5\n0,1\n")
    assert info.value.line == 3
    assert "line 3" in str(info.value)


@pytest.mark.parametrize("text", ["0,0\n1,abc\n", "0,0\n1,nan\n", "0\n1\n", "1,2,3,4\n"])
def test_csv_bad_values(text):
    with pytest.raises(ParseError):
        parse_csv(text)


def test_json_points(tmp_path):
    p = write(tmp_path, "p.json", json.dumps({"points": [[0, 0], [1, 0], [0, 1]]}))
    assert len(ingest(p)) == 3
    with pytest.raises(DimensionError):
        ingest(write(tmp_path, "q.json", "[[0, 0], [1, 0, 0]]"))
    with pytest.raises(ParseError):
        ingest(write(tmp_path, "r.json", "[[0, 0],"))


def test_tetra_complex(tmp_path):
    text = "# one tet\nv 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\n\nt 0 1 2 3\n"
    cx = ingest(write(tmp_path, "a.tet", text), "tetra-complex")
    assert isinstance(cx, TetraComplex)
    assert cx.vertices.shape == (4, 3) and cx.tetrahedra.tolist() == [[0, 1, 2, 3]]


@pytest.mark.parametrize("text, line", [
    ("v 0 0\n", 1),
    ("v 0 0 0\nt 0 1 2 3\n", 2),
    ("v 0 0 0\nq 1\n", 2),
    ("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nt 0 1 2 3\nv 1 1 1\n", 6),
])
def test_tetra_complex_errors(tmp_path, text, line):
    with pytest.raises(ParseError) as info:
        ingest(write(tmp_path, "b.tet", text), "tetra-complex")
    assert info.value.line == line


def test_unknown_format_and_missing_file(tmp_path):
    with pytest.raises(InputError):
        ingest(write(tmp_path, "a.csv", "0,0\n"), "xlsx")
    with pytest.raises(InputError):
        ingest(tmp_path / "missing.csv")


def test_surface_file(tmp_path):
    data = {
        "grid": np.zeros((3, 3, 3)).tolist(),
        "weights": np.ones((3, 3)).tolist(),
        "knots_u": [0, 0, 0, 1, 1, 1],
        "knots_v": [0, 0, 0, 1, 1, 1],
        "order_u": 3,
        "order_v": 3,
    }
    s = load_surface(write(tmp_path, "s.json", json.dumps(data)))
    assert s.control_grid.shape == (3, 3, 3)
    del data["knots_v"]
    with pytest.raises(InputError):
        load_surface(write(tmp_path, "t.json", json.dumps(data)))
