"""End-to-end pipeline: normalise, triangulate, cluster, extract, fit, score."""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .cluster import classify_edges, edge_stats, extract_boundary_edges, form_clusters, orient_cycles
from .curvature import DEFAULT_QUADRATURE, shape_score_curve
from .errors import DimensionError, InputError, ShapeScoreError
from .fit import FitConfig, fit_closed_curve, normalize_unit_volume
from .geometry import PointCloud
from .spline import KnotVector, SplineCurve
from .triangulate import triangulate

log = logging.getLogger(__name__)

STAGES = ("cluster", "boundary", "fit", "score")


@dataclass
class PipelineConfig:
    m: float = 1.5
    order: int = 4
    control_count: Optional[int] = None
    control_fraction: float = 1.0 / 3.0
    min_controls: int = 8
    regularization: float = 0.0
    quadrature: int = DEFAULT_QUADRATURE
    normalize: bool = True
    workers: int = 1
    timing: bool = False
    input: Optional[str] = None
    output: Optional[str] = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not (isinstance(self.m, (int, float)) and self.m >= 0):
            raise InputError(f"m must be a non-negative number, got {self.m!r}")
        if not (isinstance(self.order, int) and 2 <= self.order <= 10):
            raise InputError(f"order must be an integer in [2, 10], got {self.order!r}")
        if self.control_count is not None and not (isinstance(self.control_count, int)
                                                   and self.control_count >= self.order):
            raise InputError("control_count must be an integer no smaller than the order")
        if not 0 < self.control_fraction <= 1:
            raise InputError("control_fraction must lie in (0, 1]")
        if not (isinstance(self.min_controls, int) and self.min_controls >= 1):
            raise InputError("min_controls must be a positive integer")
        if not self.regularization >= 0:
            raise InputError("regularization must be non-negative")
        if not (isinstance(self.quadrature, int) and 1 <= self.quadrature <= 64):
            raise InputError("quadrature order must be an integer in [1, 64]")
        if not (isinstance(self.workers, int) and self.workers >= 1):
            raise InputError("workers must be a positive integer")
        return self

    @property
    def fit_config(self):
        return FitConfig(control_count=self.control_count, control_fraction=self.control_fraction,
                         min_controls=self.min_controls, order=self.order,
                         regularization=self.regularization)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path):
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON config ({exc})") from exc
        if not isinstance(data, dict):
            raise InputError(f"{path}: config must be a JSON object")
        return cls.from_dict(data)

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    def merged(self, **overrides):
        data = self.to_dict()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return PipelineConfig.from_dict(data)


class ShapeReport(dict):
    """JSON-ready report; top-level keys ``config``, ``edge_stats``,
    ``clusters`` and ``scale`` plus bookkeeping."""

    def to_json(self, indent=2):
        return json.dumps(self, indent=indent, allow_nan=False) + "\n"

    def write(self, path):
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def read(cls, path):
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))

    @property
    def total_score(self):
        return float(sum(c.get("score", 0.0) for c in self["clusters"]))


def curve_from_record(rec) -> SplineCurve:
    """Rebuild the fitted spline stored in a loop record of the report."""
    kv = KnotVector(rec["knots"], periodic=rec.get("periodic", True))
    return SplineCurve(np.array(rec["control_points"]), kv, rec["order"], rec.get("weights"))


def rescore_report(report, order=DEFAULT_QUADRATURE) -> ShapeReport:
    """Score every fitted loop stored in ``report`` and refresh the totals."""
    report = ShapeReport(json.loads(json.dumps(report)))
    for c in report.get("clusters", []):
        total, err = 0.0, 0.0
        for lrec in c.get("loops", []):
            if not lrec.get("fitted"):
                lrec["score"], lrec["score_error"] = 0.0, 0.0
                continue
            try:
                s = shape_score_curve(curve_from_record(lrec), order=order)
            except ShapeScoreError as exc:
                raise exc.tag(stage="score", cluster=c.get("id"))
            lrec["score"], lrec["score_error"] = s.value, s.error_estimate
            total += s.value
            err += s.error_estimate
        c["score"], c["score_error"] = total, err
    report["total_score"] = report.total_score
    return report


def _floats(a):
    return np.asarray(a, dtype=float).tolist()


def _process_cluster(cluster, coords, row_of, cfg: PipelineConfig, upto):
    rec = {
        "id": cluster.id,
        "point_count": 0,
        "points": [],
        "triangle_count": int(len(cluster.triangles)),
        "degenerate": bool(cluster.degenerate),
        "loops": [],
        "diagnostics": [],
    }
    if cluster.degenerate:
        rec["diagnostics"].append("degenerate cluster: fewer than 3 points or no surviving triangle")
        if STAGES.index(upto) >= STAGES.index("score"):
            rec["score"] = 0.0
            rec["score_error"] = 0.0
        return rec
    if STAGES.index(upto) < STAGES.index("boundary"):
        return rec
    stage = "boundary"
    try:
        edges = extract_boundary_edges(cluster)
        loops = orient_cycles(edges, coords)
        fit_cfg = cfg.fit_config
        curves = []
        for lp in loops:
            lrec = {
                "vertices": [row_of[v] for v in lp.vertices],
                "coords": _floats(coords[list(lp.vertices)]),
                "hole": lp.hole,
                "signed_area": lp.signed_area,
            }
            rec["loops"].append(lrec)
            if STAGES.index(upto) < STAGES.index("fit"):
                continue
            stage = "fit"
            if len(lp) < cfg.order:
                lrec["diagnostics"] = [f"loop of {len(lp)} vertices is too short for an order-{cfg.order} fit"]
                lrec["fitted"] = False
                curves.append(None)
                continue
            res = fit_closed_curve(coords[list(lp.vertices)], fit_cfg)
            lrec.update({
                "fitted": True,
                "order": res.curve.order,
                "periodic": True,
                "knots": _floats(res.curve.knots.knots),
                "control_points": _floats(res.curve.control_points),
                "weights": _floats(res.curve.weights),
                "rms": res.rms,
            })
            curves.append(res.curve)
        if STAGES.index(upto) >= STAGES.index("fit"):
            fitted = [lr for lr in rec["loops"] if lr.get("fitted")]
            rec["rms"] = float(np.sqrt(np.mean([lr["rms"] ** 2 for lr in fitted]))) if fitted else 0.0
        if STAGES.index(upto) >= STAGES.index("score"):
            stage = "score"
            total, err = 0.0, 0.0
            for lrec, curve in zip(rec["loops"], curves):
                if curve is None:
                    lrec["score"], lrec["score_error"] = 0.0, 0.0
                    continue
                s = shape_score_curve(curve, order=cfg.quadrature)
                lrec["score"], lrec["score_error"] = s.value, s.error_estimate
                total += s.value
                err += s.error_estimate
            rec["score"], rec["score_error"] = total, err
    except ShapeScoreError as exc:
        raise exc.tag(stage=stage, cluster=cluster.id)
    return rec


def run_pipeline(cloud, cfg: PipelineConfig = None, upto="score") -> ShapeReport:
    """Run the stages up to and including ``upto`` and build the report.

    Scores are reported in normalised coordinates when ``cfg.normalize`` is
    set; multiply a curve score by ``report["scale"]`` to express it in the
    input units.
    """
    cfg = cfg or PipelineConfig()
    if upto not in STAGES:
        raise InputError(f"unknown stage {upto!r}")
    clock = {}
    t0 = time.perf_counter()
    if not isinstance(cloud, PointCloud):
        cloud = PointCloud.from_rows(np.asarray(cloud, dtype=float))
    if len(cloud) and cloud.dim != 2:
        raise DimensionError("the point-cloud pipeline handles 2D data only", stage="ingest")
    cloud.require(3)
    scale = 1.0
    if cfg.normalize:
        try:
            cloud, scale = normalize_unit_volume(cloud)
        except ShapeScoreError as exc:
            raise exc.tag(stage="normalize")
    clock["normalize"] = time.perf_counter() - t0

    t1 = time.perf_counter()
    try:
        tri = triangulate(cloud)
    except ShapeScoreError as exc:
        raise exc.tag(stage="triangulate")
    clock["triangulate"] = time.perf_counter() - t1

    t1 = time.perf_counter()
    stats = edge_stats(tri)
    classes = classify_edges(tri, stats, cfg.m)
    part = form_clusters(tri, classes)
    clock["cluster"] = time.perf_counter() - t1

    coords = tri.points
    row_of = [ix[0] for ix in cloud.indices]
    t1 = time.perf_counter()
    work = list(part.clusters)
    if cfg.workers > 1 and len(work) > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            recs = list(pool.map(lambda c: _process_cluster(c, coords, row_of, cfg, upto), work))
    else:
        recs = [_process_cluster(c, coords, row_of, cfg, upto) for c in work]
    for rec, cl in zip(recs, work):
        rows = sorted(r for v in cl.vertices for r in cloud.indices[v])
        rec["points"] = rows
        rec["point_count"] = len(rows)
    clock["boundary_fit_score"] = time.perf_counter() - t1

    lo, hi = stats.thresholds(cfg.m)
    report = ShapeReport({
        "version": 1,
        "dim": 2,
        "config": cfg.to_dict(),
        "scale": scale,
        "n_rows": cloud.n_rows,
        "n_vertices": len(cloud),
        "duplicates": {str(k): v for k, v in sorted(cloud.duplicate_map().items())},
        "edge_stats": {
            "mean": stats.mean,
            "std": stats.std,
            "count": stats.count,
            "m": cfg.m,
            "short_below": lo,
            "long_above": hi,
            "labels": classes.counts(),
        },
        "clusters": recs,
    })
    if STAGES.index(upto) >= STAGES.index("score"):
        report["total_score"] = report.total_score
    if cfg.timing:
        clock["total"] = time.perf_counter() - t0
        report["timing"] = clock
    return report
