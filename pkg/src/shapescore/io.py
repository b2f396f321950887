"""Readers for point clouds, tetrahedral complexes and surface control grids."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .cluster import TetraComplex
from .errors import DimensionError, InputError, ParseError
from .geometry import PointCloud
from .spline import KnotVector, SplineSurface

FORMATS = ("csv", "json", "tetra-complex")


def guess_format(path):
    suffix = Path(path).suffix.lower()
    if suffix in (".json",):
        return "json"
    if suffix in (".tet", ".tetra", ".complex"):
        return "tetra-complex"
    return "csv"


def _read_text(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _number(tok, line):
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"not a number: {tok!r}", line) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {tok!r}", line)
    return v


def parse_csv(text) -> PointCloud:
    """Points from CSV text: optional header, 2 or 3 numeric columns.

    Row ids count data rows from 0, so a header line does not shift them.
    """
    rows, ids = [], []
    width = None
    reader = csv.reader(io.StringIO(text))
    for lineno, rec in enumerate(reader, start=1):
        cells = [c.strip() for c in rec]
        if not cells or all(c == "" for c in cells):
            continue
        if lineno == 1 and not rows:
            try:
                [float(c) for c in cells]
            except ValueError:
                continue  # header
        if width is None:
            width = len(cells)
            if width not in (2, 3):
                raise ParseError(f"expected 2 or 3 columns, found {width}", lineno)
        elif len(cells) != width:
            raise ParseError(f"expected {width} columns, found {len(cells)}", lineno)
        rows.append([_number(c, lineno) for c in cells])
        ids.append(len(ids))
    return PointCloud.from_rows(rows, ids) if rows else PointCloud(np.zeros((0, 2)), [])


def parse_json_points(text) -> PointCloud:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from exc
    if isinstance(data, dict):
        data = data.get("points")
    if not isinstance(data, list):
        raise InputError("JSON input must be a list of points or an object with a 'points' list")
    for k, p in enumerate(data):
        if not isinstance(p, list) or not all(isinstance(c, (int, float)) for c in p):
            raise InputError(f"point {k} is not a list of numbers")
    dims = {len(p) for p in data}
    if len(dims) > 1:
        raise DimensionError(f"inconsistent point dimensions {sorted(dims)}")
    return PointCloud.from_rows(data)


def parse_tetra_complex(text) -> TetraComplex:
    """``v x y z`` vertex lines followed by ``t i j k l`` tetrahedron lines.

    Indices are 0-based; blank lines and ``#`` comments are ignored.
    """
    verts, tets = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tag, *rest = line.split()
        if tag == "v":
            if tets:
                raise ParseError("vertex line after tetrahedron lines", lineno)
            if len(rest) != 3:
                raise ParseError(f"vertex needs 3 coordinates, got {len(rest)}", lineno)
            verts.append([_number(c, lineno) for c in rest])
        elif tag == "t":
            if len(rest) != 4:
                raise ParseError(f"tetrahedron needs 4 indices, got {len(rest)}", lineno)
            try:
                idx = [int(c) for c in rest]
            except ValueError:
                raise ParseError(f"bad vertex index in {rest}", lineno) from None
            bad = [i for i in idx if not 0 <= i < len(verts)]
            if bad:
                raise ParseError(f"vertex index {bad[0]} out of range", lineno)
            tets.append(idx)
        else:
            raise ParseError(f"unknown record {tag!r}", lineno)
    return TetraComplex(np.array(verts, dtype=float).reshape(-1, 3), np.array(tets, dtype=np.int64).reshape(-1, 4))


def ingest(path, format=None):
    """Read a point cloud (csv, json) or a tetrahedral complex from ``path``."""
    fmt = format or guess_format(path)
    if fmt not in FORMATS:
        raise InputError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    text = _read_text(path)
    if fmt == "csv":
        return parse_csv(text)
    if fmt == "json":
        return parse_json_points(text)
    return parse_tetra_complex(text)


def surface_from_dict(data) -> SplineSurface:
    """Surface from ``grid``, ``weights``, ``knots_u``, ``knots_v``,
    ``order_u`` and ``order_v`` (``weights`` may be omitted)."""
    missing = [k for k in ("grid", "knots_u", "knots_v", "order_u", "order_v") if k not in data]
    if missing:
        raise InputError(f"surface description lacks {missing}")
    grid = np.asarray(data["grid"], dtype=float)
    if grid.ndim != 3 or grid.shape[2] != 3:
        raise DimensionError(f"grid must be rows x cols x 3, got shape {grid.shape}")
    return SplineSurface(
        grid,
        KnotVector(data["knots_u"], bool(data.get("periodic_u", False))),
        KnotVector(data["knots_v"], bool(data.get("periodic_v", False))),
        int(data["order_u"]),
        int(data["order_v"]),
        data.get("weights"),
    )


def load_surface(path) -> SplineSurface:
    try:
        data = json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from exc
    if not isinstance(data, dict):
        raise InputError("surface file must hold a JSON object")
    return surface_from_dict(data)
