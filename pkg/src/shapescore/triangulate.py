"""Planar Delaunay triangulation by incremental Bowyer-Watson insertion.

Points are inserted in Hilbert-curve order so that the walking point
location stays short.  The unbounded face is handled with a symbolic vertex
at infinity: every convex hull edge carries a "ghost" triangle whose
circumcircle is the open half plane beyond that edge (plus the open edge
itself).  This removes the need for a finite enclosing triangle, which can
leave hull edges missing after its removal.

After construction, interior edges whose quadrilateral is exactly cocircular
are flipped so that the chosen diagonal is the one touching the lowest vertex
id.  That makes the output a deterministic function of the (deduplicated)
vertex set and ids.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from .errors import CollinearError, DimensionError, TooFewPointsError
from .geometry import PointCloud, incircle_xy, orient_xy

GHOST = -1


@dataclass(frozen=True)
class Edge:
    """Undirected edge ``(i, j)`` with ``i < j``."""

    endpoints: Tuple[int, int]
    length: float
    count: int = 0

    def __post_init__(self):
        i, j = self.endpoints
        if i == j:
            raise ValueError("edge endpoints must be distinct")
        if i > j:
            object.__setattr__(self, "endpoints", (j, i))

    @property
    def key(self):
        return self.endpoints


class Triangulation:
    """Immutable planar triangulation.

    Attributes
    ----------
    vertices : PointCloud
        The deduplicated input points; vertex ``i`` is ``vertices.coords[i]``.
    triangles : ndarray of int, shape (m, 3)
        Vertex ids of each triangle in counter-clockwise order.
    edge_index : dict
        Maps an undirected edge ``(i, j)``, ``i < j``, to the ids of its
        incident triangles.
    """

    def __init__(self, vertices: PointCloud, triangles):
        self.vertices = vertices
        self.triangles = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        self.triangles.setflags(write=False)
        index: Dict[Tuple[int, int], List[int]] = defaultdict(list)
        for t, (a, b, c) in enumerate(self.triangles.tolist()):
            for u, v in ((a, b), (b, c), (c, a)):
                index[(u, v) if u < v else (v, u)].append(t)
        self.edge_index = dict(sorted(index.items()))
        self._edges = np.array(list(self.edge_index), dtype=np.int64).reshape(-1, 2)
        self._edges.setflags(write=False)
        self._adjacency = None

    @property
    def points(self):
        return self.vertices.coords

    @property
    def edges(self):
        """(k, 2) array of sorted undirected edges."""
        return self._edges

    @property
    def edge_lengths(self):
        p = self.points
        return np.linalg.norm(p[self._edges[:, 0]] - p[self._edges[:, 1]], axis=1)

    @property
    def edge_counts(self):
        return np.array([len(v) for v in self.edge_index.values()], dtype=np.int64)

    def adjacency(self):
        """Neighbour sets of every vertex."""
        if self._adjacency is None:
            adj = [set() for _ in range(len(self.vertices))]
            for i, j in self._edges.tolist():
                adj[i].add(j)
                adj[j].add(i)
            self._adjacency = adj
        return self._adjacency

    def __len__(self):
        return len(self.triangles)

    def __repr__(self):
        return f"Triangulation({len(self.vertices)} vertices, {len(self.triangles)} triangles)"


def _hilbert_keys(xy, bits=16):
    """Hilbert curve index of each point on a 2**bits grid over the bbox."""
    lo = xy.min(axis=0)
    span = xy.max(axis=0) - lo
    span[span == 0] = 1.0
    side = (1 << bits) - 1
    q = np.floor((xy - lo) / span * side).astype(np.int64)
    x, y = q[:, 0].copy(), q[:, 1].copy()
    d = np.zeros(len(xy), dtype=np.int64)
    s = 1 << (bits - 1)
    while s > 0:
        rx = (x & s) > 0
        ry = (y & s) > 0
        d += s * s * ((3 * rx) ^ ry)
        # rotate the quadrant
        flip = ~ry
        swap_mask = flip & rx
        x = np.where(swap_mask, side - x, x)
        y = np.where(swap_mask, side - y, y)
        x, y = np.where(flip, y, x), np.where(flip, x, y)
        s >>= 1
    return d


class _Builder:
    """Mutable Bowyer-Watson state; triangles are stored CCW with ghosts
    normalised to ``(a, b, GHOST)`` where ``a -> b`` is a hull edge seen
    from outside."""

    def __init__(self, xy):
        self.X = xy[:, 0].tolist()
        self.Y = xy[:, 1].tolist()
        self.tv: List[List[int]] = []
        self.nb: List[List[int]] = []
        self.alive: List[bool] = []
        self.free: List[int] = []
        self.last = 0

    def _new(self, a, b, c):
        if self.free:
            t = self.free.pop()
            self.tv[t] = [a, b, c]
            self.nb[t] = [-1, -1, -1]
            self.alive[t] = True
        else:
            t = len(self.tv)
            self.tv.append([a, b, c])
            self.nb.append([-1, -1, -1])
            self.alive.append(True)
        return t

    def start(self, a, b, c):
        X, Y = self.X, self.Y
        if orient_xy(X[a], Y[a], X[b], Y[b], X[c], Y[c]) < 0:
            b, c = c, b
        tris = [self._new(a, b, c), self._new(b, a, GHOST), self._new(c, b, GHOST), self._new(a, c, GHOST)]
        self._link(tris)
        self.last = tris[0]

    def _link(self, tris, outer=None):
        """Connect neighbours among ``tris``; ``outer`` maps a directed edge
        to the triangle already lying across it."""
        owner = {}
        for t in tris:
            v = self.tv[t]
            for i in range(3):
                owner[(v[i], v[(i + 1) % 3])] = (t, i)
        for t in tris:
            v = self.tv[t]
            nb = self.nb[t]
            for i in range(3):
                e = (v[(i + 1) % 3], v[i])
                hit = owner.get(e)
                if hit is not None:
                    nb[i] = hit[0]
                elif outer is not None and (v[i], v[(i + 1) % 3]) in outer:
                    n = outer[(v[i], v[(i + 1) % 3])]
                    nb[i] = n
                    w = self.tv[n]
                    for j in range(3):
                        if w[j] == e[0] and w[(j + 1) % 3] == e[1]:
                            self.nb[n][j] = t
                            break

    def conflict(self, t, px, py):
        a, b, c = self.tv[t]
        X, Y = self.X, self.Y
        if c == GHOST:
            o = orient_xy(X[a], Y[a], X[b], Y[b], px, py)
            if o > 0:
                return True
            if o < 0:
                return False
            # collinear with the hull edge: conflict only strictly inside it
            return (min(X[a], X[b]) <= px <= max(X[a], X[b])
                    and min(Y[a], Y[b]) <= py <= max(Y[a], Y[b]))
        return incircle_xy(X[a], Y[a], X[b], Y[b], X[c], Y[c], px, py) > 0

    def locate(self, px, py):
        X, Y = self.X, self.Y
        t = self.last
        if not self.alive[t] or self.tv[t][2] == GHOST:
            t = next(i for i, v in enumerate(self.tv) if self.alive[i] and v[2] != GHOST)
        prev = -1
        while True:
            v = self.tv[t]
            if v[2] == GHOST:
                return t
            nb = self.nb[t]
            moved = False
            # start with the edge after the one we came through
            k0 = nb.index(prev) + 1 if prev in nb else 0
            for kk in range(3):
                i = (k0 + kk) % 3
                a, b = v[i], v[(i + 1) % 3]
                if orient_xy(X[a], Y[a], X[b], Y[b], px, py) < 0:
                    prev, t = t, nb[i]
                    moved = True
                    break
            if not moved:
                return t

    def insert(self, p):
        px, py = self.X[p], self.Y[p]
        start = self.locate(px, py)
        cavity = {start}
        stack = [start]
        boundary = []
        while stack:
            t = stack.pop()
            v = self.tv[t]
            for i in range(3):
                n = self.nb[t][i]
                if n in cavity:
                    continue
                if self.conflict(n, px, py):
                    cavity.add(n)
                    stack.append(n)
                else:
                    boundary.append((v[i], v[(i + 1) % 3], n))
        # boundary edges of cavity triangles can be rediscovered as inner once
        # their neighbour joins the cavity later; filter them out
        boundary = [(u, w, n) for (u, w, n) in boundary if n not in cavity]
        for t in cavity:
            self.alive[t] = False
            self.free.append(t)
        new = []
        outer = {}
        for u, w, n in boundary:
            if u == GHOST:
                tri = (w, p, GHOST)
            elif w == GHOST:
                tri = (p, u, GHOST)
            else:
                tri = (u, w, p)
            t = self._new(*tri)
            new.append(t)
            outer[(u, w)] = n
        self._link(new, outer)
        for t in new:
            if self.tv[t][2] != GHOST:
                self.last = t
                break

    def flip_cocircular(self):
        """Flip exactly cocircular diagonals towards the lowest vertex id."""
        X, Y = self.X, self.Y
        stack = [t for t in range(len(self.tv)) if self.alive[t] and self.tv[t][2] != GHOST]
        while stack:
            t = stack.pop()
            if not self.alive[t] or self.tv[t][2] == GHOST:
                continue
            for i in range(3):
                u = self.nb[t][i]
                if self.tv[u][2] == GHOST:
                    continue
                x, y, z = self.tv[t][i], self.tv[t][(i + 1) % 3], self.tv[t][(i + 2) % 3]
                uv = self.tv[u]
                j = next(j for j in range(3) if uv[j] == y and uv[(j + 1) % 3] == x)
                w = uv[(j + 2) % 3]
                if min(z, w) >= min(x, y):
                    continue
                if incircle_xy(X[x], Y[x], X[y], Y[y], X[z], Y[z], X[w], Y[w]) != 0:
                    continue
                outer = {}
                for tri, tv in ((t, self.tv[t]), (u, uv)):
                    for k in range(3):
                        e = (tv[k], tv[(k + 1) % 3])
                        if e not in ((x, y), (y, x)):
                            outer[e] = self.nb[tri][k]
                self.tv[t] = [x, w, z]
                self.tv[u] = [w, y, z]
                self.nb[t] = [-1, -1, -1]
                self.nb[u] = [-1, -1, -1]
                self._link([t, u], outer)
                stack.extend((t, u))
                break

    def solid(self):
        return [v for t, v in enumerate(self.tv) if self.alive[t] and v[2] != GHOST]


def triangulate(points) -> Triangulation:
    """Delaunay triangulation of a 2D point cloud.

    Parameters
    ----------
    points : PointCloud or array_like of shape (n, 2)
        Raw arrays are deduplicated first.

    Raises
    ------
    TooFewPointsError
        Fewer than three distinct points.
    CollinearError
        All points lie on one line.
    """
    cloud = points if isinstance(points, PointCloud) else PointCloud.from_rows(np.asarray(points, dtype=float))
    if len(cloud) and cloud.dim != 2:
        raise DimensionError("triangulate() only handles 2D point clouds")
    n = len(cloud)
    if n < 3:
        raise TooFewPointsError(f"need at least 3 distinct points, got {n}")
    xy = cloud.coords
    order = np.lexsort((np.arange(n), _hilbert_keys(xy))).tolist()

    b = _Builder(xy)
    X, Y = b.X, b.Y
    a0, a1 = order[0], order[1]
    third = None
    for k in range(2, n):
        c = order[k]
        if orient_xy(X[a0], Y[a0], X[a1], Y[a1], X[c], Y[c]) != 0:
            third = k
            break
    if third is None:
        raise CollinearError("all points are collinear")
    b.start(a0, a1, order[third])
    for k in range(2, n):
        if k != third:
            b.insert(order[k])
    b.flip_cocircular()
    tris = sorted(_canonical(v) for v in b.solid())
    return Triangulation(cloud, tris)


def _canonical(tri):
    """Rotate a CCW triple so that its smallest id comes first."""
    k = tri.index(min(tri))
    return tuple(tri[k:] + tri[:k])


def edges_of(tri: Triangulation) -> List[Edge]:
    """Every undirected edge once, with its length and incident-triangle count."""
    lengths = tri.edge_lengths.tolist()
    return [Edge((i, j), length, len(ts)) for ((i, j), ts), length in zip(tri.edge_index.items(), lengths)]
