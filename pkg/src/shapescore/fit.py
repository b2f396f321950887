"""Least-squares fitting of closed B-splines to boundary loops."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DegenerateExtentError,
    InputError,
    OverdeterminedError,
    RankDeficiencyError,
    TooFewPointsError,
)
from .geometry import PointCloud
from .spline import KnotVector, SplineCurve, basis_matrix

# normal matrices worse than this are reported as rank deficient
_MAX_CONDITION = 1e13


@dataclass(frozen=True)
class FitConfig:
    """Hyperparameters of the boundary fit.

    ``control_count`` fixes the number of control points; when it is None the
    count is ``max(min_controls, ceil(n * control_fraction))`` capped at the
    number of boundary points ``n``.  ``weights`` optionally fixes NURBS
    weights (one per control point); they are never tuned.
    """

    control_count: Optional[int] = None
    control_fraction: float = 1.0 / 3.0
    min_controls: int = 8
    order: int = 4
    regularization: float = 0.0
    weights: Optional[tuple] = None

    def __post_init__(self):
        if self.order < 2:
            raise InputError("order must be at least 2")
        if self.control_count is not None and self.control_count < self.order:
            raise InputError(f"control_count {self.control_count} is below the order {self.order}")
        if not self.regularization >= 0:
            raise InputError("regularization must be non-negative")
        if not 0 < self.control_fraction <= 1:
            raise InputError("control_fraction must lie in (0, 1]")

    def controls_for(self, n_points):
        if self.control_count is not None:
            return self.control_count
        return min(n_points, max(self.min_controls, math.ceil(n_points * self.control_fraction)))


@dataclass(frozen=True)
class FitResult:
    curve: SplineCurve
    params: np.ndarray
    residuals: np.ndarray
    rms: float


def normalize_unit_volume(points):
    """Scale points uniformly so their bounding box has unit volume.

    Returns ``(scaled, scale)`` where ``scaled = scale * points``.  Accepts a
    :class:`PointCloud` (returned as one) or an array.
    """
    cloud = points if isinstance(points, PointCloud) else None
    xy = cloud.coords if cloud is not None else np.asarray(points, dtype=float)
    if len(xy) < 2:
        raise TooFewPointsError("normalisation needs at least two points")
    extent = xy.max(axis=0) - xy.min(axis=0)
    if np.any(extent <= 0):
        raise DegenerateExtentError(f"bounding box has zero extent along axis {int(np.argmin(extent))}")
    volume = float(np.prod(extent))
    scale = volume ** (-1.0 / xy.shape[1])
    if cloud is not None:
        return cloud.scaled(scale), scale
    return xy * scale, scale


def _coords(loop, points):
    if points is not None:
        return np.asarray(points, dtype=float)[list(loop.vertices if hasattr(loop, "vertices") else loop)]
    return np.asarray(loop, dtype=float)


def chord_parametrize(loop, points=None):
    """Cumulative chord-length parameters of a closed polygon, in [0, 1).

    ``loop`` is an (n, d) array of vertex coordinates, or a loop of vertex ids
    together with ``points``.
    """
    xy = _coords(loop, points)
    if len(xy) < 3:
        raise TooFewPointsError("a closed loop needs at least three vertices")
    chords = np.linalg.norm(np.roll(xy, -1, axis=0) - xy, axis=1)
    if np.any(chords == 0):
        raise InputError(f"repeated consecutive vertex at position {int(np.argmin(chords))}")
    total = math.fsum(chords)
    return np.concatenate([[0.0], np.cumsum(chords[:-1])]) / total


def _breaks(params, n):
    """Knot breakpoints spread so every span holds about m / n parameters."""
    t = np.append(params, 1.0)
    x = np.arange(n) * (len(params) / n)
    j = np.floor(x).astype(int)
    a = x - j
    return (1 - a) * t[j] + a * t[j + 1]


def _periodic_design(params, n, k, weights=None):
    kv = KnotVector.periodic_from_breaks(_breaks(params, n), k)
    B = basis_matrix(kv, k, params)
    A = np.zeros((len(params), n))
    for j in range(B.shape[1]):
        A[:, j % n] += B[:, j]
    if weights is not None:
        A = A * weights
        A /= A.sum(axis=1, keepdims=True)
    return A, kv


def _second_difference(n):
    D = np.zeros((n, n))
    for i in range(n):
        D[i, (i - 1) % n] += 1.0
        D[i, i] -= 2.0
        D[i, (i + 1) % n] += 1.0
    return D


def fit_closed_curve(loop, cfg: FitConfig = FitConfig(), points=None) -> FitResult:
    """Closed spline minimising the squared distance to the loop's vertices.

    Parameters are fixed by chord length and the periodic knots are placed at
    parameter quantiles (uniform when all chords are equal), so the problem
    is linear in the control points and is solved through its
    normal equations (plus ``regularization`` times the squared cyclic
    second difference of the control polygon).

    Raises
    ------
    OverdeterminedError
        More control points requested than there are boundary points.
    RankDeficiencyError
        The normal matrix is singular or numerically close to it.
    """
    xy = _coords(loop, points)
    m = len(xy)
    k = cfg.order
    n = cfg.controls_for(m)
    if n > m:
        raise OverdeterminedError(f"{n} control points requested for a loop of {m} points")
    if n < k:
        raise OverdeterminedError(f"a loop of {m} points cannot carry an order-{k} closed spline")
    t = chord_parametrize(xy)
    w = None if cfg.weights is None else np.asarray(cfg.weights, dtype=float)
    if w is not None and len(w) != n:
        raise InputError(f"{len(w)} weights given for {n} control points")
    A, kv = _periodic_design(t, n, k, w)
    M = A.T @ A
    if cfg.regularization > 0:
        D = _second_difference(n)
        M = M + cfg.regularization * (D.T @ D)
    rhs = A.T @ xy
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > _MAX_CONDITION:
        raise RankDeficiencyError(f"normal matrix is rank deficient (condition {cond:.3g}); "
                                  f"try fewer than {n} control points or add regularization")
    C = np.linalg.solve(M, rhs)
    # one step of iterative refinement
    C += np.linalg.solve(M, rhs - M @ C)
    curve = SplineCurve(C, kv, k, w)
    res = np.linalg.norm(curve(t) - xy, axis=1)
    return FitResult(curve, t, res, float(np.sqrt(np.mean(res ** 2))))
