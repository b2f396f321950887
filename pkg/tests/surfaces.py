"""Exact spline representations of a few classical surfaces."""

import numpy as np

from shapescore import KnotVector, SplineSurface

R2 = np.sqrt(0.5)
# full circle as a rational quadratic with 9 control points
CIRCLE_XY = np.array([(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0)], dtype=float)
CIRCLE_W = np.array([1, R2, 1, R2, 1, R2, 1, R2, 1])
CIRCLE_KNOTS = [0, 0, 0, 0.25, 0.25, 0.5, 0.5, 0.75, 0.75, 1, 1, 1]
# half meridian from the south pole to the north pole: (radius, height) pairs
MERIDIAN = np.array([(0, -1), (1, -1), (1, 0), (1, 1), (0, 1)], dtype=float)
MERIDIAN_W = np.array([1, R2, 1, R2, 1])
MERIDIAN_KNOTS = [0, 0, 0, 0.5, 0.5, 1, 1, 1]


def sphere(radius=1.0, centre=(0.0, 0.0, 0.0)):
    grid = np.empty((9, 5, 3))
    for i, (cx, cy) in enumerate(CIRCLE_XY):
        for j, (r, z) in enumerate(MERIDIAN):
            grid[i, j] = radius * np.array([cx * r, cy * r, z])
    grid += centre
    w = np.outer(CIRCLE_W, MERIDIAN_W)
    return SplineSurface(grid, KnotVector(CIRCLE_KNOTS), KnotVector(MERIDIAN_KNOTS), 3, 3, w)


def cylinder(radius=1.0, height=1.0):
    grid = np.empty((9, 2, 3))
    for i, (cx, cy) in enumerate(CIRCLE_XY):
        for j, z in enumerate((0.0, height)):
            grid[i, j] = (radius * cx, radius * cy, z)
    w = np.outer(CIRCLE_W, [1, 1])
    return SplineSurface(grid, KnotVector(CIRCLE_KNOTS), KnotVector.bezier(2), 3, 2, w)


def bezier_graph(z, lo=-1.0, hi=1.0):
    """Graph patch over [lo, hi]^2 with Bernstein coefficients ``z`` (square array)."""
    n = len(z)
    xs = np.linspace(lo, hi, n)
    grid = np.stack([*np.meshgrid(xs, xs, indexing="ij"), np.asarray(z, dtype=float)], axis=-1)
    kv = KnotVector.bezier(n, lo, hi)
    return SplineSurface(grid, kv, kv, n, n)


def flat(n=4):
    return bezier_graph(np.zeros((n, n)), 0.0, 1.0)


def saddle():
    # z = u v over [-1, 1]^2 is bilinear
    return bezier_graph([[1.0, -1.0], [-1.0, 1.0]])


def paraboloid():
    # z = u^2 + v^2
    return bezier_graph([[2, 0, 2], [0, -2, 0], [2, 0, 2]])


def extrusion(curve_xy, order=4, height=1.0):
    """Plane curve (clamped, given by control points) swept along z."""
    P = np.asarray(curve_xy, dtype=float)
    grid = np.stack([np.c_[P, np.zeros(len(P))], np.c_[P, np.full(len(P), height)]], axis=1)
    return SplineSurface(grid, KnotVector.clamped_uniform(len(P), order), KnotVector.bezier(2), order, 2)


def rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def moved(surface, A, b):
    G = surface.control_grid @ np.asarray(A).T + b
    return SplineSurface(G, surface.knots_u, surface.knots_v, surface.order_u, surface.order_v, surface.weights)
