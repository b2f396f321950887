import xml.etree.ElementTree as ET

import numpy as np
import pytest

from shapescore import PipelineConfig, run_pipeline
from shapescore.errors import DimensionError
from shapescore.svg import emit_svg, render_svg

NS = "{http://www.w3.org/2000/svg}"


def ring(n, r=1.0, centre=(0, 0)):
    t = 2 * np.pi * np.arange(n) / n
    return np.asarray(centre) + r * np.c_[np.cos(t), np.sin(t)]


def parse(text):
    return ET.fromstring(text)


def test_unit_circle_one_closed_path(tmp_path):
    rep = run_pipeline(ring(100), PipelineConfig(normalize=False, m=10))
    path = emit_svg(rep, tmp_path / "c.svg")
    root = parse(path.read_text())
    paths = root.findall(f".//{NS}path")
    assert len(paths) == 1
    d = paths[0].get("d")
    assert d.startswith("M ") and d.endswith(" Z") and d.count(" L ") == 255


def test_two_clusters_two_groups():
    rng = np.random.default_rng(0)
    pts = np.vstack([rng.normal(0, 1, (150, 2)), rng.normal(0, 1, (150, 2)) + (12, 0)])
    root = parse(render_svg(run_pipeline(pts)))
    groups = [g for g in root.findall(f"{NS}g") if g.findall(f"{NS}path")]
    assert len(groups) == 2
    assert len({g.get("stroke") for g in groups}) == 2
    assert all(g.find(f"{NS}text") is not None for g in groups)


def test_empty_report_is_valid_svg():
    root = parse(render_svg({"dim": 2, "clusters": []}))
    assert root.tag == f"{NS}svg" and not root.findall(f".//{NS}path")


def test_three_dimensional_report_rejected():
    with pytest.raises(DimensionError):
        render_svg({"dim": 3, "clusters": []})
