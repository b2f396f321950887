"""Command line front end.

Subcommands
-----------
cluster, boundary, fit, pipeline
    Run the point-cloud pipeline up to the named stage and write the JSON
    report.  ``boundary`` on a tetra-complex file lists its outward boundary
    faces instead.
score
    Re-score the fitted loops of a report written by ``fit``.
score-surface
    Score a spline surface given as a JSON control grid.

Settings come from the defaults, then ``--config FILE`` (JSON), then flags.
Exit status is 0 on success, 2 for input errors, 3 for degenerate geometry
and 4 for numerical failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .cluster import extract_boundary_faces_3d
from .curvature import shape_score_surface
from .errors import InputError, ShapeScoreError
from .io import FORMATS, ingest, load_surface
from .pipeline import PipelineConfig, ShapeReport, rescore_report, run_pipeline
from .svg import emit_svg

log = logging.getLogger("shapescore")

# flag dest -> PipelineConfig field
_CONFIG_FLAGS = {
    "m": "m",
    "order": "order",
    "controls": "control_count",
    "control_fraction": "control_fraction",
    "min_controls": "min_controls",
    "regularization": "regularization",
    "quadrature": "quadrature",
    "normalize": "normalize",
    "workers": "workers",
    "timing": "timing",
}


def _config_args(p, *, pipeline=True):
    g = p.add_argument_group("configuration")
    g.add_argument("--config", metavar="FILE", help="JSON config file; flags override its values")
    g.add_argument("--quadrature", type=int, metavar="N", help="Gauss-Legendre points per span (default 16)")
    if not pipeline:
        return
    g.add_argument("--m", type=float, help="edge threshold multiplier (default 1.5)")
    g.add_argument("--order", type=int, help="spline order k (default 4, cubic)")
    g.add_argument("--controls", type=int, metavar="N", help="fixed number of control points per loop")
    g.add_argument("--control-fraction", type=float, metavar="F",
                   help="control points per boundary point when --controls is unset (default 1/3)")
    g.add_argument("--min-controls", type=int, metavar="N", help="lower bound on control points (default 8)")
    g.add_argument("--regularization", type=float, metavar="LAMBDA", help="smoothing weight (default 0)")
    g.add_argument("--normalize", dest="normalize", action="store_true", default=None,
                   help="scale the cloud to a unit-area bounding box (default)")
    g.add_argument("--no-normalize", dest="normalize", action="store_false", help="keep input units")
    g.add_argument("--workers", type=int, help="threads for per-cluster fitting (default 1)")
    g.add_argument("--timing", action="store_true", default=None, help="add stage timings to the report")


def build_parser():
    parser = argparse.ArgumentParser(prog="shapescore",
                                     description="Shape complexity of point-cloud clusters.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (("cluster", "triangulate and cluster"),
                           ("boundary", "cluster and extract oriented boundary loops"),
                           ("fit", "fit closed splines to the boundary loops"),
                           ("pipeline", "full run including shape scores")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("input", nargs="?", help="point file (csv or json)")
        p.add_argument("-f", "--format", choices=FORMATS, help="input format (default: from suffix)")
        p.add_argument("-o", "--output", help="report path (default: stdout)")
        if name == "pipeline":
            p.add_argument("--svg", metavar="FILE", help="also draw the report as SVG")
        _config_args(p)

    p = sub.add_parser("score", help="score the fitted loops of a report written by 'fit'")
    p.add_argument("report", help="JSON report containing fitted loops")
    p.add_argument("-o", "--output", help="report path (default: stdout)")
    _config_args(p, pipeline=False)

    p = sub.add_parser("score-surface", help="score a spline surface control grid")
    p.add_argument("surface", help="JSON with grid, weights, knots_u, knots_v, order_u, order_v")
    p.add_argument("-o", "--output", help="result path (default: stdout)")
    _config_args(p, pipeline=False)
    return parser


def resolve_config(args) -> PipelineConfig:
    """Defaults, then the config file, then explicit flags."""
    cfg = PipelineConfig.load(args.config) if getattr(args, "config", None) else PipelineConfig()
    overrides = {field: getattr(args, dest) for dest, field in _CONFIG_FLAGS.items()
                 if getattr(args, dest, None) is not None}
    if getattr(args, "input", None):
        overrides["input"] = args.input
    if getattr(args, "output", None):
        overrides["output"] = args.output
    return cfg.merged(**overrides)


def _emit(payload, path):
    text = payload.to_json() if isinstance(payload, ShapeReport) else \
        json.dumps(payload, indent=2, allow_nan=False) + "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _run_stage(args, cfg):
    if not cfg.input:
        raise InputError("no input file given")
    data = ingest(cfg.input, args.format)
    if args.command == "boundary" and not hasattr(data, "coords"):
        faces = sorted(extract_boundary_faces_3d(data), key=lambda f: f.vertices)
        return {"dim": 3, "faces": [list(map(int, f.vertices)) for f in faces]}
    if not hasattr(data, "coords"):
        raise InputError(f"'{args.command}' expects a point cloud, not a tetra-complex")
    upto = {"cluster": "cluster", "boundary": "boundary", "fit": "fit", "pipeline": "score"}[args.command]
    report = run_pipeline(data, cfg, upto=upto)
    if getattr(args, "svg", None):
        emit_svg(report, args.svg)
    return report


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        if args.command == "score":
            try:
                report = ShapeReport.read(args.report)
            except (OSError, json.JSONDecodeError) as exc:
                raise InputError(f"cannot read report {args.report}: {exc}") from exc
            payload = rescore_report(report, cfg.quadrature)
        elif args.command == "score-surface":
            s = shape_score_surface(load_surface(args.surface), order=cfg.quadrature)
            payload = {"score": s.value, "score_error": s.error_estimate,
                       "reliable": s.diagnostics["reliable"],
                       "singular_points": s.diagnostics["singular_points"]}
        else:
            payload = _run_stage(args, cfg)
        _emit(payload, cfg.output)
    except ShapeScoreError as exc:
        print(f"shapescore: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"shapescore: {exc}", file=sys.stderr)
        return InputError.exit_code
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
