import json
import subprocess
import sys

import numpy as np
import pytest

from shapescore.cli import build_parser, main, resolve_config
from surfaces import CIRCLE_KNOTS, MERIDIAN_KNOTS, sphere


@pytest.fixture
def annulus_csv(tmp_path):
    t1 = 2 * np.pi * np.arange(40) / 40
    t2 = 0.01 + 2 * np.pi * np.arange(160) / 160
    pts = np.vstack([np.c_[np.cos(t1), np.sin(t1)], 1.1 * np.c_[np.cos(t2), np.sin(t2)]])
    path = tmp_path / "annulus.csv"
    np.savetxt(path, pts, delimiter=",", header="x,y", comments="")
    return path


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_pipeline_to_stdout_and_svg(annulus_csv, tmp_path, capsys):
    svg = tmp_path / "out.svg"
    code, out, _ = run(["pipeline", annulus_csv, "--svg", svg], capsys)
    assert code == 0
    rep = json.loads(out)
    assert len(rep["clusters"][0]["loops"]) == 2 and rep["total_score"] > 0
    assert svg.read_text().count("<path") == 2


@pytest.mark.parametrize("cmd, key", [("cluster", None), ("boundary", "coords"), ("fit", "knots")])
def test_stage_commands(annulus_csv, tmp_path, capsys, cmd, key):
    out = tmp_path / f"{cmd}.json"
    code, _, _ = run([cmd, annulus_csv, "-o", out], capsys)
    assert code == 0
    rep = json.loads(out.read_text())
    assert "total_score" not in rep
    loops = rep["clusters"][0]["loops"]
    if key:
        assert all(key in lp for lp in loops)
    else:
        assert loops == []


def test_fit_then_score_matches_pipeline(annulus_csv, tmp_path, capsys):
    fitted = tmp_path / "fit.json"
    assert run(["fit", annulus_csv, "-o", fitted], capsys)[0] == 0
    code, out, _ = run(["score", fitted], capsys)
    assert code == 0
    _, full, _ = run(["pipeline", annulus_csv], capsys)
    assert json.loads(out)["total_score"] == pytest.approx(json.loads(full)["total_score"], rel=1e-12)


def test_boundary_of_tetra_complex(tmp_path, capsys):
    p = tmp_path / "two.tet"
    p.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nv 1 1 1\nt 0 1 2 3\nt 1 2 3 4\n")
    code, out, _ = run(["boundary", p, "-f", "tetra-complex"], capsys)
    assert code == 0
    faces = json.loads(out)["faces"]
    assert len(faces) == 6 and sorted(map(sorted, faces)).count([1, 2, 3]) == 0


def test_score_surface(tmp_path, capsys):
    s = sphere(2.0)
    p = tmp_path / "sphere.json"
    p.write_text(json.dumps({
        "grid": s.control_grid.tolist(), "weights": s.weights.tolist(),
        "knots_u": CIRCLE_KNOTS, "knots_v": MERIDIAN_KNOTS, "order_u": 3, "order_v": 3,
    }))
    code, out, _ = run(["score-surface", p], capsys)
    assert code == 0
    assert json.loads(out)["score"] == pytest.approx(4 * np.pi, rel=1e-6)


@pytest.mark.parametrize("content, code", [
    ("x,y\n0,0\n1\n", 2),            # ragged row
    ("0,0\n1,1\n2,2\n", 3),          # collinear
    ("0,0\n1,1\n", 3),               # too few points
])
def test_exit_codes(tmp_path, capsys, content, code):
    p = tmp_path / "bad.csv"
    p.write_text(content)
    got, _, err = run(["pipeline", p], capsys)
    assert got == code
    assert err.startswith("shapescore: ")


def test_numerical_failure_exit_code(tmp_path, capsys):
    # more control points than boundary vertices
    p = tmp_path / "sq.csv"
    p.write_text("0,0\n1,0\n1,1\n0,1\n0.5,0.5\n")
    code, _, err = run(["pipeline", p, "--controls", "20"], capsys)
    assert code == 4 and "stage=fit" in err


def test_missing_input(capsys, tmp_path):
    assert run(["pipeline", tmp_path / "nope.csv"], capsys)[0] == 2
    assert run(["pipeline"], capsys)[0] == 2


def test_config_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"m": 2.5, "order": 3, "quadrature": 8}))
    args = build_parser().parse_args(["pipeline", "in.csv", "--config", str(cfg), "--m", "4"])
    resolved = resolve_config(args)
    assert (resolved.m, resolved.order, resolved.quadrature, resolved.input) == (4.0, 3, 8, "in.csv")
    args = build_parser().parse_args(["pipeline", "in.csv", "--no-normalize"])
    assert resolve_config(args).normalize is False


def test_bad_config_file(tmp_path, annulus_csv, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"colour": "red"}))
    assert run(["pipeline", annulus_csv, "--config", cfg], capsys)[0] == 2


def test_module_entry_point(annulus_csv):
    proc = subprocess.run([sys.executable, "-m", "shapescore", "cluster", str(annulus_csv)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["dim"] == 2


def test_byte_identical_reports(annulus_csv, tmp_path, capsys):
    # the report records its own output path, so repeat the identical command
    out = tmp_path / "a.json"
    run(["pipeline", annulus_csv, "-o", out], capsys)
    first = out.read_bytes()
    run(["pipeline", annulus_csv, "-o", out], capsys)
    assert out.read_bytes() == first
