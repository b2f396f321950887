"""Independent reference implementations used as test oracles.

Nothing here imports the package under test.  Predicates use exact rational
arithmetic, the spline basis is a direct transcription of the recursive
definition and Bezier curves are evaluated with de Casteljau's algorithm.
"""

from fractions import Fraction
import math

import numpy as np

# reference complex: vertices 1..7, its triangles and its boundary
FIGURE_POINTS = {1: (0, 0), 2: (0, 2), 3: (1, 1), 4: (1, -1), 5: (0, -3), 6: (-1, -1), 7: (-1, 2)}
FIGURE_TRIANGLES = [(1, 2, 3), (1, 3, 4), (1, 4, 6), (4, 5, 6), (1, 2, 7)]
FIGURE_BOUNDARY = {(2, 3), (3, 4), (4, 5), (5, 6), (1, 6), (1, 7), (2, 7)}
FIGURE_INTERIOR = {(1, 2), (1, 3), (1, 4), (4, 6)}


def sign(x):
    return (x > 0) - (x < 0)


def orient_exact(a, b, c):
    ax, ay, bx, by, cx, cy = (Fraction(v) for v in (*a, *b, *c))
    return sign((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))


def incircle_exact(a, b, c, d):
    """Sign of the classic 3x3 incircle determinant (+1: d inside when abc is CCW)."""
    rows = []
    for p in (a, b, c):
        x, y = Fraction(p[0]) - Fraction(d[0]), Fraction(p[1]) - Fraction(d[1])
        rows.append((x, y, x * x + y * y))
    (a1, a2, a3), (b1, b2, b3), (c1, c2, c3) = rows
    det = a1 * (b2 * c3 - b3 * c2) - a2 * (b1 * c3 - b3 * c1) + a3 * (b1 * c2 - b2 * c1)
    return sign(det)


def delaunay_violations(points, triangles):
    """(triangle, vertex) pairs with the vertex strictly inside the circumcircle."""
    pts = [tuple(map(float, p)) for p in points]
    bad = []
    for tri in triangles:
        a, b, c = (pts[i] for i in tri)
        o = orient_exact(a, b, c)
        for v, p in enumerate(pts):
            if v in tri:
                continue
            if o * incircle_exact(a, b, c, p) > 0:
                bad.append((tuple(tri), v))
    return bad


def cox_de_boor(i, k, t, knots):
    """N_{i,k}(t) straight from the recursion, half-open spans, 0/0 := 0."""
    T = knots
    if k == 1:
        return 1 if T[i] <= t < T[i + 1] else 0  # ints keep Fraction inputs exact
    left = 0
    if T[i + k - 1] != T[i]:
        left = (t - T[i]) / (T[i + k - 1] - T[i]) * cox_de_boor(i, k - 1, t, T)
    right = 0
    if T[i + k] != T[i + 1]:
        right = (T[i + k] - t) / (T[i + k] - T[i + 1]) * cox_de_boor(i + 1, k - 1, t, T)
    return left + right


def de_casteljau(control, t):
    P = [np.asarray(p, dtype=float) for p in control]
    while len(P) > 1:
        P = [(1 - t) * P[j] + t * P[j + 1] for j in range(len(P) - 1)]
    return P[0]


def bernstein_curve(control, t):
    n = len(control) - 1
    return sum(math.comb(n, j) * (1 - t) ** (n - j) * t ** j * np.asarray(p, dtype=float)
               for j, p in enumerate(control))


def circle_score(radius):
    """Integral of curvature squared over arc length for a full circle."""
    return 2 * math.pi / radius


def sphere_score():
    return 4 * math.pi


def cylinder_score(radius, height):
    return math.pi * height / radius


def polygon_area(xy):
    x, y = np.asarray(xy, dtype=float).T
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def monge_KH(fu, fv, fuu, fuv, fvv):
    """Gaussian and mean curvature of a graph z = f(u, v), H = (k1 + k2) / 2."""
    g = 1.0 + fu ** 2 + fv ** 2
    K = (fuu * fvv - fuv ** 2) / g ** 2
    H = ((1 + fv ** 2) * fuu - 2 * fu * fv * fuv + (1 + fu ** 2) * fvv) / (2 * g ** 1.5)
    return K, H
