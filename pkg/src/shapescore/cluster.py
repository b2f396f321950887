"""Edge-length clustering and boundary extraction on a Delaunay triangulation.

The edges of the full triangulation are labelled short, long or other by
comparing their length against the global mean plus or minus ``m`` standard
deviations.  Short edges always join their endpoints.  An "other" edge
``(u, v)`` joins them when ``u`` and ``v`` have a common neighbour ``w`` with
neither ``(u, w)`` nor ``(v, w)`` long.  Long edges never join anything.

A triangle survives in its cluster when all three vertices share the cluster
and none of its edges is long.  Boundary edges are the surviving edges that
belong to exactly one surviving triangle.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import InputError, InvalidComplexError, NonManifoldBoundaryError
from .triangulate import Edge, Triangulation

log = logging.getLogger(__name__)

SHORT, LONG, OTHER = "short", "long", "other"


@dataclass(frozen=True)
class EdgeStats:
    mean: float
    std: float
    count: int

    def thresholds(self, m):
        """(short_below, long_above) cut-offs for a given ``m``."""
        return self.mean - m * self.std, self.mean + m * self.std


def _lengths(edges) -> np.ndarray:
    if isinstance(edges, Triangulation):
        return edges.edge_lengths
    edges = list(edges) if not isinstance(edges, np.ndarray) else edges
    if len(edges) and isinstance(edges[0], Edge):
        return np.array([e.length for e in edges], dtype=float)
    return np.asarray(edges, dtype=float)


def edge_stats(edges) -> EdgeStats:
    """Mean and population standard deviation of edge lengths.

    ``edges`` may be a list of :class:`Edge`, a plain sequence of lengths or
    a :class:`Triangulation`.
    """
    lengths = _lengths(edges)
    if len(lengths) == 0:
        raise InputError("edge statistics need at least one edge")
    mean = math.fsum(lengths) / len(lengths)
    var = math.fsum((lengths - mean) ** 2) / len(lengths)
    return EdgeStats(mean, math.sqrt(var), len(lengths))


@dataclass
class EdgeClass:
    """Per-edge labels aligned with ``Triangulation.edges``."""

    edges: np.ndarray
    lengths: np.ndarray
    labels: np.ndarray
    m: float
    stats: EdgeStats
    _lookup: Dict[Tuple[int, int], str] = field(default=None, repr=False)

    def label(self, i, j):
        if self._lookup is None:
            self._lookup = dict(zip(map(tuple, self.edges.tolist()), self.labels.tolist()))
        return self._lookup[(i, j) if i < j else (j, i)]

    def counts(self):
        return {lab: int(np.count_nonzero(self.labels == lab)) for lab in (SHORT, LONG, OTHER)}

    def at_vertex(self, v):
        """Incident edges of ``v`` sorted by length, grouped by label."""
        mask = (self.edges[:, 0] == v) | (self.edges[:, 1] == v)
        idx = np.flatnonzero(mask)
        idx = idx[np.argsort(self.lengths[idx], kind="stable")]
        out = {SHORT: [], LONG: [], OTHER: []}
        for k in idx.tolist():
            i, j = self.edges[k]
            out[self.labels[k]].append(int(j if i == v else i))
        return out


def classify_edges(tri: Triangulation, stats: EdgeStats, m: float) -> EdgeClass:
    """Label every edge of ``tri`` short, long or other.

    Strict inequalities are used on both sides, so an edge exactly at a
    threshold is "other" and a zero standard deviation labels everything
    "other".
    """
    if not m >= 0:
        raise InputError(f"m must be non-negative, got {m}")
    lengths = tri.edge_lengths
    lo, hi = stats.thresholds(m)
    labels = np.full(len(lengths), OTHER, dtype="<U5")
    labels[lengths < lo] = SHORT
    labels[lengths > hi] = LONG
    return EdgeClass(tri.edges, lengths, labels, float(m), stats)


@dataclass(frozen=True)
class SubComplex:
    """Triangles of one cluster, with ids into the shared ``points`` array."""

    triangles: np.ndarray
    points: np.ndarray

    @property
    def vertices(self):
        return np.unique(self.triangles)


@dataclass(frozen=True)
class Cluster:
    id: int
    vertices: Tuple[int, ...]
    complex: SubComplex

    @property
    def triangles(self):
        return self.complex.triangles

    @property
    def degenerate(self):
        return len(self.vertices) < 3 or len(self.complex.triangles) == 0


@dataclass
class ClusterPartition:
    labels: np.ndarray
    clusters: List[Cluster]

    def __len__(self):
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)

    def __getitem__(self, cid):
        return self.clusters[cid]


def _merge_edges(tri: Triangulation, classes: EdgeClass):
    adj = tri.adjacency()
    long_set = {tuple(e) for e in classes.edges[classes.labels == LONG].tolist()}

    def nonlong(a, b):
        return ((a, b) if a < b else (b, a)) not in long_set

    keep = []
    for (u, v), lab in zip(classes.edges.tolist(), classes.labels.tolist()):
        if lab == SHORT:
            keep.append((u, v))
        elif lab == OTHER:
            for w in adj[u] & adj[v]:
                if nonlong(u, w) and nonlong(v, w):
                    keep.append((u, v))
                    break
    return keep


def form_clusters(tri: Triangulation, classes: EdgeClass) -> ClusterPartition:
    """Connected components of the merge graph, plus surviving triangles.

    Cluster ids are assigned in order of each cluster's lowest vertex id.
    """
    n = len(tri.vertices)
    if len(classes.edges) != len(tri.edges) or not np.array_equal(classes.edges, tri.edges):
        raise InputError("edge classes were computed for a different triangulation")
    keep = np.array(_merge_edges(tri, classes), dtype=np.int64).reshape(-1, 2)
    graph = coo_matrix((np.ones(len(keep)), (keep[:, 0], keep[:, 1])), shape=(n, n))
    _, comp = connected_components(graph, directed=False)
    # relabel by first vertex so ids are deterministic
    _, first = np.unique(comp, return_index=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    labels = rank[comp]

    t = tri.triangles
    same = (labels[t[:, 0]] == labels[t[:, 1]]) & (labels[t[:, 1]] == labels[t[:, 2]])
    long_keys = {tuple(e) for e in classes.edges[classes.labels == LONG].tolist()}
    if long_keys:
        has_long = np.array([
            any(((a, b) if a < b else (b, a)) in long_keys for a, b in ((x, y), (y, z), (z, x)))
            for x, y, z in t.tolist()
        ], dtype=bool)
    else:
        has_long = np.zeros(len(t), dtype=bool)
    survive = same & ~has_long
    tri_label = labels[t[:, 0]]

    members = defaultdict(list)
    for v, lab in enumerate(labels.tolist()):
        members[lab].append(v)
    by_cluster = defaultdict(list)
    for k in np.flatnonzero(survive).tolist():
        by_cluster[int(tri_label[k])].append(k)
    clusters = []
    for cid in range(len(first)):
        sub = SubComplex(t[by_cluster.get(cid, [])].reshape(-1, 3), tri.points)
        clusters.append(Cluster(cid, tuple(members[cid]), sub))
    return ClusterPartition(labels, clusters)


def _triangles_of(sub):
    if hasattr(sub, "triangles"):
        return np.asarray(sub.triangles, dtype=np.int64).reshape(-1, 3)
    return np.asarray(sub, dtype=np.int64).reshape(-1, 3)


def extract_boundary_edges(sub, points=None) -> Set[Edge]:
    """Edges that belong to exactly one triangle of ``sub``.

    ``sub`` is a :class:`Cluster`, a :class:`SubComplex` or a plain
    ``(k, 3)`` array of vertex ids; in the last case ``points`` supplies the
    coordinates used for edge lengths.
    """
    tris = _triangles_of(sub)
    if points is None:
        points = getattr(sub, "points", None)
        if points is None and hasattr(sub, "complex"):
            points = sub.complex.points
    if len(tris) == 0:
        log.warning("degenerate cluster: no surviving triangles, boundary is empty")
        return set()
    count = defaultdict(int)
    for a, b, c in tris.tolist():
        for u, v in ((a, b), (b, c), (c, a)):
            count[(u, v) if u < v else (v, u)] += 1
    out = set()
    pts = None if points is None else np.asarray(points, dtype=float)
    for (u, v), k in count.items():
        if k == 1:
            length = float(np.linalg.norm(pts[u] - pts[v])) if pts is not None else float("nan")
            out.add(Edge((u, v), length, 1))
    return out


@dataclass(frozen=True)
class Triangle:
    vertices: Tuple[int, int, int]

    def __post_init__(self):
        if len(set(self.vertices)) != 3:
            raise ValueError(f"triangle vertices must be distinct: {self.vertices}")

    @property
    def key(self):
        return tuple(sorted(self.vertices))


@dataclass(frozen=True)
class TetraComplex:
    """User supplied tetrahedral complex: (n, 3) vertices, (k, 4) tetrahedra."""

    vertices: np.ndarray
    tetrahedra: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        t = np.asarray(self.tetrahedra, dtype=np.int64).reshape(-1, 4)
        if len(t) and (t.min() < 0 or t.max() >= len(v)):
            raise InvalidComplexError("tetrahedron references a missing vertex")
        for row in t.tolist():
            if len(set(row)) != 4:
                raise InvalidComplexError(f"tetrahedron with repeated vertex: {row}")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "tetrahedra", t)


def extract_boundary_faces_3d(complex: TetraComplex) -> Set[Triangle]:
    """Triangular faces incident to exactly one tetrahedron.

    Faces are returned oriented with their normal pointing away from the
    owning tetrahedron.
    """
    owners = defaultdict(list)
    for k, (a, b, c, d) in enumerate(complex.tetrahedra.tolist()):
        for face, opp in (((b, c, d), a), ((a, c, d), b), ((a, b, d), c), ((a, b, c), d)):
            owners[tuple(sorted(face))].append((face, opp))
    P = complex.vertices
    out = set()
    for key, inc in owners.items():
        if len(inc) > 2:
            raise InvalidComplexError(f"face {key} belongs to {len(inc)} tetrahedra")
        if len(inc) == 1:
            (a, b, c), opp = inc[0]
            normal = np.cross(P[b] - P[a], P[c] - P[a])
            if np.dot(normal, P[opp] - P[a]) > 0:
                b, c = c, b
            out.add(Triangle((a, b, c)))
    return out


@dataclass(frozen=True)
class BoundaryLoop:
    """Closed boundary cycle; the closing edge back to ``vertices[0]`` is implicit."""

    vertices: Tuple[int, ...]
    signed_area: float
    hole: bool = False

    @property
    def ccw(self):
        return self.signed_area > 0

    def __len__(self):
        return len(self.vertices)

    def edges(self):
        v = self.vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]


def _edge_key(e):
    if isinstance(e, Edge):
        return e.endpoints
    i, j = e
    return (i, j) if i < j else (j, i)


def _walk(adj, pts):
    """Split an even-degree edge set into closed walks.

    At a vertex with several unused edges the walk takes the sharpest
    clockwise turn.
    """
    walks = []
    for start in sorted(adj):
        while adj[start]:
            prev, cur = start, min(adj[start])
            adj[start].discard(cur)
            adj[cur].discard(start)
            seq = [start]
            while cur != start:
                seq.append(cur)
                cand = adj[cur]
                if len(cand) == 1:
                    nxt = next(iter(cand))
                else:
                    bx, by = pts[prev] - pts[cur]
                    back = math.atan2(by, bx)

                    def ccw_from_back(w):
                        dx, dy = pts[w] - pts[cur]
                        a = (math.atan2(dy, dx) - back) % (2 * math.pi)
                        return (a if a > 0 else 2 * math.pi, w)

                    nxt = min(cand, key=ccw_from_back)
                adj[cur].discard(nxt)
                adj[nxt].discard(cur)
                prev, cur = cur, nxt
            walks.append(seq)
    return walks


def _simple_cycles(seq):
    """Cut a closed walk with repeated vertices into simple cycles."""
    out = []
    stack = []
    pos = {}
    for v in seq:
        if v in pos:
            k = pos[v]
            cyc = stack[k:]
            for u in cyc[1:]:
                del pos[u]
            del stack[k + 1:]
            out.append(cyc)
        else:
            pos[v] = len(stack)
            stack.append(v)
    out.append(stack)
    return [c for c in out if len(c) >= 3]


def _contains(poly, bbox, pts_xy):
    """Vectorised even-odd test of many points against one polygon."""
    x, y = pts_xy[:, 0], pts_xy[:, 1]
    inside = np.zeros(len(pts_xy), dtype=bool)
    cand = (x >= bbox[0]) & (x <= bbox[2]) & (y >= bbox[1]) & (y <= bbox[3])
    if not cand.any():
        return inside
    xs, ys = x[cand], y[cand]
    res = np.zeros(len(xs), dtype=bool)
    x0, y0 = poly[:, 0], poly[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    for a, b, c, d in zip(x0, y0, x1, y1):
        crosses = (b > ys) != (d > ys)
        if crosses.any():
            xc = a + (ys - b) * (c - a) / np.where(d != b, d - b, 1.0)
            res ^= crosses & (xc > xs)
    inside[cand] = res
    return inside


def orient_cycles(boundary: Iterable, points) -> List[BoundaryLoop]:
    """Chain boundary edges into closed loops and orient them.

    Outer loops come out counter-clockwise and holes clockwise, where a loop
    is a hole when it is nested inside an odd number of other loops.  Each
    loop starts at its smallest vertex id.

    Raises
    ------
    NonManifoldBoundaryError
        A vertex has an odd number of boundary edges.
    """
    pts = np.asarray(points, dtype=float)
    adj: Dict[int, Set[int]] = defaultdict(set)
    for e in boundary:
        i, j = _edge_key(e)
        adj[i].add(j)
        adj[j].add(i)
    odd = sorted(v for v, nb in adj.items() if len(nb) % 2)
    if odd:
        raise NonManifoldBoundaryError(f"boundary vertices with odd degree: {odd[:10]}")

    cycles = []
    for walk in _walk(adj, pts):
        cycles.extend(_simple_cycles(walk))

    polys = [pts[c] for c in cycles]
    areas = []
    for poly in polys:
        x, y = poly[:, 0], poly[:, 1]
        areas.append(0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))
    probes = np.array([(p[0] + p[1]) / 2 for p in polys]).reshape(-1, 2)
    depth = np.zeros(len(cycles), dtype=int)
    for k, poly in enumerate(polys):
        bbox = (*poly.min(axis=0), *poly.max(axis=0))
        hit = _contains(poly, bbox, probes)
        hit[k] = False
        depth += hit

    loops = []
    for cyc, area, d in zip(cycles, areas, depth.tolist()):
        hole = d % 2 == 1
        if (area > 0) == hole:
            cyc = cyc[::-1]
            area = -area
        k = cyc.index(min(cyc))
        loops.append(BoundaryLoop(tuple(cyc[k:] + cyc[:k]), area, hole))
    loops.sort(key=lambda lp: lp.vertices)
    return loops
