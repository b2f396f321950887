"""Point types and exact-sign planar predicates.

The predicates use a floating point filter (Shewchuk's static error bounds)
and fall back to exact integer arithmetic when the filter cannot certify the
sign.  Every finite double is a dyadic rational, so scaling all coordinates
of one query by a common power of two turns them into Python integers and the
determinant is then evaluated without rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateGeometryError, DimensionError, InputError, TooFewPointsError

_EPS = np.finfo(float).eps / 2.0
_CCW_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS
_ICC_ERRBOUND = (10.0 + 96.0 * _EPS) * _EPS


@dataclass(frozen=True)
class Point:
    """A point of the input cloud.

    ``index`` is the first input row that produced this point; ``indices``
    lists every row collapsed onto it by deduplication.
    """

    coords: tuple
    index: int = -1
    indices: tuple = field(default=())

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if len(coords) not in (2, 3):
            raise DimensionError(f"points must be 2D or 3D, got {len(coords)} coordinates")
        if not all(math.isfinite(c) for c in coords):
            raise InputError(f"non-finite coordinate in {coords}")
        object.__setattr__(self, "coords", coords)
        if not self.indices:
            object.__setattr__(self, "indices", (self.index,))

    @property
    def dim(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)


class PointCloud:
    """Deduplicated cloud of 2D or 3D points.

    Rows with bit-identical coordinates collapse onto one vertex.  Vertex
    order follows the first occurrence of each distinct coordinate tuple, so
    vertex ids are stable for a fixed input order.
    """

    def __init__(self, coords, indices=None):
        arr = np.asarray(coords, dtype=float)
        if arr.ndim != 2 or arr.shape[1] not in (2, 3):
            raise DimensionError(f"expected an (n, 2) or (n, 3) array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("point cloud contains NaN or Inf")
        if indices is None:
            indices = [(i,) for i in range(len(arr))]
        if len(indices) != len(arr):
            raise InputError("indices and coordinates differ in length")
        self.coords = arr
        self.coords.setflags(write=False)
        self.indices = [tuple(ix) for ix in indices]

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[float]], row_ids=None) -> "PointCloud":
        """Build a cloud from raw rows, merging exact duplicates."""
        rows = [tuple(float(c) for c in r) for r in rows]
        if not rows:
            return cls(np.zeros((0, 2)), [])
        dims = {len(r) for r in rows}
        if len(dims) != 1:
            raise DimensionError(f"inconsistent dimensions {sorted(dims)}")
        if row_ids is None:
            row_ids = range(len(rows))
        seen: dict = {}
        order = []
        for rid, r in zip(row_ids, rows):
            # -0.0 == 0.0 but hashes equal too, so they merge
            if r in seen:
                seen[r].append(rid)
            else:
                seen[r] = [rid]
                order.append(r)
        return cls(np.array(order, dtype=float), [tuple(seen[r]) for r in order])

    def __len__(self):
        return len(self.coords)

    @property
    def dim(self):
        return self.coords.shape[1]

    @property
    def n_rows(self):
        return sum(len(ix) for ix in self.indices)

    def point(self, i) -> Point:
        return Point(tuple(self.coords[i]), self.indices[i][0], self.indices[i])

    def points(self):
        return [self.point(i) for i in range(len(self))]

    def duplicate_map(self):
        """Map each merged input row to the row it was merged into."""
        return {rid: ix[0] for ix in self.indices for rid in ix[1:]}

    def scaled(self, s) -> "PointCloud":
        return PointCloud(self.coords * s, self.indices)

    def require(self, n=3):
        if len(self) < n:
            raise TooFewPointsError(f"need at least {n} distinct points, got {len(self)}")
        return self


def _xy(p):
    if len(p) != 2:
        raise DimensionError(f"planar predicate called with a {len(p)}D point")
    return float(p[0]), float(p[1])


def _to_integers(values):
    """Scale floats by a common power of two so that all become integers."""
    ratios = [v.as_integer_ratio() for v in values]
    den = max(d for _, d in ratios)
    return [n * (den // d) for n, d in ratios]


def _orient_exact(ax, ay, bx, by, cx, cy):
    ax, ay, bx, by, cx, cy = _to_integers((ax, ay, bx, by, cx, cy))
    det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    return (det > 0) - (det < 0)


def orient_xy(ax, ay, bx, by, cx, cy):
    """Sign of the signed area of (a, b, c) from raw coordinates."""
    detleft = (ax - cx) * (by - cy)
    detright = (ay - cy) * (bx - cx)
    det = detleft - detright
    if abs(det) > _CCW_ERRBOUND * (abs(detleft) + abs(detright)):
        return 1 if det > 0 else -1
    return _orient_exact(ax, ay, bx, by, cx, cy)


def _incircle_exact(ax, ay, bx, by, cx, cy, dx, dy):
    ax, ay, bx, by, cx, cy, dx, dy = _to_integers((ax, ay, bx, by, cx, cy, dx, dy))
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    det = ((adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
           + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy)
           + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady))
    return (det > 0) - (det < 0)


def incircle_xy(ax, ay, bx, by, cx, cy, dx, dy):
    """Raw incircle determinant sign; positive when d lies inside the
    circle through a, b, c taken counter-clockwise."""
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    bdxcdy = bdx * cdy
    cdxbdy = cdx * bdy
    alift = adx * adx + ady * ady
    cdxady = cdx * ady
    adxcdy = adx * cdy
    blift = bdx * bdx + bdy * bdy
    adxbdy = adx * bdy
    bdxady = bdx * ady
    clift = cdx * cdx + cdy * cdy
    det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady)
    permanent = ((abs(bdxcdy) + abs(cdxbdy)) * alift
                 + (abs(cdxady) + abs(adxcdy)) * blift
                 + (abs(adxbdy) + abs(bdxady)) * clift)
    if abs(det) > _ICC_ERRBOUND * permanent:
        return 1 if det > 0 else -1
    return _incircle_exact(ax, ay, bx, by, cx, cy, dx, dy)


def orient2d(a, b, c) -> int:
    """Orientation of the triangle (a, b, c).

    Returns +1 for counter-clockwise, -1 for clockwise and 0 for collinear
    points.  The sign is exact for all finite double inputs.
    """
    ax, ay = _xy(a)
    bx, by = _xy(b)
    cx, cy = _xy(c)
    return orient_xy(ax, ay, bx, by, cx, cy)


def in_circumcircle(a, b, c, p) -> int:
    """Position of ``p`` relative to the circumcircle of triangle abc.

    With abc counter-clockwise: +1 strictly inside, -1 strictly outside,
    0 on the circle.  Reversing the orientation of abc negates the result.
    """
    ax, ay = _xy(a)
    bx, by = _xy(b)
    cx, cy = _xy(c)
    px, py = _xy(p)
    if orient_xy(ax, ay, bx, by, cx, cy) == 0:
        raise DegenerateGeometryError("circumcircle of collinear points is undefined")
    return incircle_xy(ax, ay, bx, by, cx, cy, px, py)


def signed_area(xy) -> float:
    """Shoelace area of a closed polygon given as an (n, 2) array."""
    xy = np.asarray(xy, dtype=float)
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def point_in_polygon(pt, xy) -> bool:
    """Even-odd ray casting test; points on the boundary are unspecified."""
    x, y = pt
    xy = np.asarray(xy, dtype=float)
    inside = False
    n = len(xy)
    for i in range(n):
        x0, y0 = xy[i - 1]
        x1, y1 = xy[i]
        if (y0 > y) != (y1 > y):
            xc = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
            if xc > x:
                inside = not inside
    return inside
