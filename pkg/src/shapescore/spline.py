"""Cox-de Boor B-spline bases and rational (NURBS) curves and surfaces.

Orders are counted as in the Cox-de Boor recursion: order ``k`` means
piecewise polynomials of degree ``k - 1``, so cubic splines have ``k = 4``.
Terms of the recursion whose knot difference vanishes are taken as zero,
which makes repeated (clamped) knots well defined.

A periodic knot vector describes a closed curve.  Its control net holds the
``n`` distinct control points; the basis is built on ``n + k - 1`` extended
indices and extended index ``j`` refers to control point ``j % n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import DomainError, InputError, InvalidWeightsError


@dataclass(frozen=True)
class KnotVector:
    knots: np.ndarray
    periodic: bool = False

    def __post_init__(self):
        t = np.array(self.knots, dtype=float).ravel()
        if len(t) < 2:
            raise InputError("a knot vector needs at least two knots")
        if not np.all(np.isfinite(t)):
            raise InputError("knots must be finite")
        if np.any(np.diff(t) < 0):
            raise InputError("knots must be non-decreasing")
        t.setflags(write=False)
        object.__setattr__(self, "knots", t)

    def __len__(self):
        return len(self.knots)

    def __getitem__(self, i):
        return self.knots[i]

    @classmethod
    def uniform_periodic(cls, n, k=4):
        """Uniform closed knots for ``n`` control points over [0, 1]."""
        if n < k:
            raise InputError(f"periodic spline of order {k} needs at least {k} control points")
        return cls((np.arange(n + 2 * k - 1) - (k - 1)) / n, periodic=True)

    @classmethod
    def periodic_from_breaks(cls, breaks, k=4):
        """Closed knots with the given breakpoints in [0, 1), period 1.

        ``breaks[0]`` must be 0; one control point per breakpoint.
        """
        b = np.asarray(breaks, dtype=float)
        n = len(b)
        if n < k:
            raise InputError(f"periodic spline of order {k} needs at least {k} control points")
        if b[0] != 0 or np.any(np.diff(b) <= 0) or b[-1] >= 1:
            raise InputError("breakpoints must start at 0 and increase strictly below 1")
        full = np.concatenate([b[n - (k - 1):] - 1.0, b, 1.0 + b[:k]])
        return cls(full, periodic=True)

    @classmethod
    def clamped_uniform(cls, n, k=4, a=0.0, b=1.0):
        """Open knots with ``k``-fold end knots and uniform interior."""
        if n < k:
            raise InputError(f"need at least {k} control points for order {k}")
        inner = np.linspace(a, b, n - k + 2)[1:-1]
        return cls(np.concatenate([np.full(k, a), inner, np.full(k, b)]))

    @classmethod
    def bezier(cls, k, a=0.0, b=1.0):
        return cls(np.concatenate([np.full(k, a), np.full(k, b)]))

    def n_basis(self, k):
        return len(self.knots) - k

    def domain(self, k) -> Tuple[float, float]:
        """Parameter interval on which the order-``k`` basis sums to one."""
        n = self.n_basis(k)
        if n < 1:
            raise InputError(f"{len(self.knots)} knots cannot carry order {k}")
        return float(self.knots[k - 1]), float(self.knots[n])

    def spans(self, k):
        """Non-empty knot intervals inside the domain, as (lo, hi) pairs."""
        a, b = self.domain(k)
        t = np.unique(self.knots[(self.knots >= a) & (self.knots <= b)])
        return np.column_stack([t[:-1], t[1:]])

    def wrap(self, t, k):
        a, b = self.domain(k)
        return a + np.mod(np.asarray(t, dtype=float) - a, b - a)

    def find_span(self, t, k):
        """Index ``s`` with ``knots[s] <= t < knots[s + 1]`` inside the domain;
        the right end of the domain belongs to the last non-empty span."""
        T = self.knots
        n = self.n_basis(k)
        t = np.asarray(t, dtype=float)
        s = np.searchsorted(T, t, side="right") - 1
        s = np.clip(s, k - 1, n - 1)
        # right end: step back over empty spans
        last = n - 1
        while T[last] == T[last + 1] and last > k - 1:
            last -= 1
        return np.minimum(s, last)


def _as_knots(knots):
    return knots if isinstance(knots, KnotVector) else KnotVector(knots)


def _check_t(t, kv: KnotVector, k):
    T = kv.knots
    if kv.periodic:
        return float(kv.wrap(t, k))
    if not (T[0] <= t <= T[-1]):
        raise DomainError(f"parameter {t} outside knot range [{T[0]}, {T[-1]}]")
    return float(t)


def _span_any(t, T):
    """Half-open span containing t anywhere in the knot range; the last
    knot belongs to the last non-empty span."""
    s = int(np.searchsorted(T, t, side="right")) - 1
    if s >= len(T) - 1:
        s = len(T) - 2
        while s > 0 and T[s] == T[s + 1]:
            s -= 1
    return s


def _ratio(num, den):
    return num / den if den != 0 else 0.0


def _cox_de_boor(i, k, t, T, s, memo):
    key = (i, k)
    if key in memo:
        return memo[key]
    if k == 1:
        out = (1.0 if i == s else 0.0, 0.0, 0.0)
    else:
        n0, d0, e0 = _cox_de_boor(i, k - 1, t, T, s, memo)
        n1, d1, e1 = _cox_de_boor(i + 1, k - 1, t, T, s, memo)
        den0 = T[i + k - 1] - T[i]
        den1 = T[i + k] - T[i + 1]
        val = _ratio(t - T[i], den0) * n0 + _ratio(T[i + k] - t, den1) * n1
        der = _ratio(n0 + (t - T[i]) * d0, den0) + _ratio(-n1 + (T[i + k] - t) * d1, den1)
        sec = _ratio(2 * d0 + (t - T[i]) * e0, den0) + _ratio(-2 * d1 + (T[i + k] - t) * e1, den1)
        out = (val, der, sec)
    memo[key] = out
    return out


def _scalar(i, k, t, knots):
    kv = _as_knots(knots)
    T = kv.knots
    if k < 1:
        raise InputError("order must be at least 1")
    if not 0 <= i <= len(T) - k - 1:
        raise InputError(f"basis index {i} out of range for {len(T)} knots and order {k}")
    t = _check_t(t, kv, k)
    return _cox_de_boor(i, k, t, T, _span_any(t, T), {})


def basis(i, k, t, knots) -> float:
    """Value of the Cox-de Boor basis function N_{i,k} at ``t``."""
    return _scalar(i, k, t, knots)[0]


def basis_derivative(i, k, t, knots) -> float:
    """First derivative of N_{i,k}, from the four-term derivative recursion."""
    if k < 2:
        raise InputError("derivative needs order >= 2")
    return _scalar(i, k, t, knots)[1]


def basis_second_derivative(i, k, t, knots) -> float:
    """Second derivative of N_{i,k}: the derivative recursion applied twice."""
    if k < 3:
        raise InputError("second derivative needs order >= 3")
    return _scalar(i, k, t, knots)[2]


def local_basis(kv: KnotVector, k, t, nder=2):
    """Non-zero basis functions and derivatives at many parameters.

    Parameters
    ----------
    kv : KnotVector
    k : int
        Order.
    t : array_like
        Parameters inside the domain (wrapped first for periodic knots).
    nder : int
        Highest derivative wanted, 0 to 2.

    Returns
    -------
    spans : ndarray of int, shape (m,)
        Span index ``s`` of each parameter; column ``c`` of the value arrays
        is basis index ``s - k + 1 + c``.
    values : ndarray, shape (nder + 1, m, k)
    """
    T = kv.knots
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if kv.periodic:
        t = kv.wrap(t, k)
    else:
        a, b = kv.domain(k)
        bad = (t < a) | (t > b)
        if bad.any():
            raise DomainError(f"parameter {t[bad][0]} outside spline domain [{a}, {b}]")
    s = kv.find_span(t, k)
    m = len(t)
    N = np.ones((m, 1))
    D1 = np.zeros((m, 1))
    D2 = np.zeros((m, 1))
    tc = t[:, None]
    zero = np.zeros((m, 1))
    for r in range(1, k):
        j = s[:, None] - r + np.arange(r + 1)[None, :]
        tj, tjr = T[j], T[j + r]
        tj1, tjr1 = T[j + 1], T[j + r + 1]
        den0, den1 = tjr - tj, tjr1 - tj1
        inv0 = np.divide(1.0, den0, out=np.zeros_like(den0), where=den0 != 0)
        inv1 = np.divide(1.0, den1, out=np.zeros_like(den1), where=den1 != 0)
        Nl, Nr = np.hstack([zero, N]), np.hstack([N, zero])
        Dl, Dr = np.hstack([zero, D1]), np.hstack([D1, zero])
        El, Er = np.hstack([zero, D2]), np.hstack([D2, zero])
        a0, a1 = (tc - tj) * inv0, (tjr1 - tc) * inv1
        N_new = a0 * Nl + a1 * Nr
        D1_new = inv0 * Nl + a0 * Dl - inv1 * Nr + a1 * Dr
        D2_new = 2 * inv0 * Dl + a0 * El - 2 * inv1 * Dr + a1 * Er
        N, D1, D2 = N_new, D1_new, D2_new
    return s, np.stack([N, D1, D2][: nder + 1])


def basis_matrix(kv: KnotVector, k, t, nder=0):
    """Dense (m, n_basis) matrix of basis values (or a derivative) at ``t``."""
    s, vals = local_basis(kv, k, t, nder)
    n = kv.n_basis(k)
    M = np.zeros((len(s), n))
    cols = s[:, None] - k + 1 + np.arange(k)
    np.put_along_axis(M, cols, vals[nder], axis=1)
    return M


def _control_index(kv: KnotVector, k, n_ctrl, cols):
    if kv.periodic:
        return cols % n_ctrl
    return cols


@dataclass(frozen=True)
class SplineCurve:
    """Rational B-spline curve.

    For an open knot vector ``len(control_points) == len(knots) - order``;
    for a periodic one the net holds the distinct control points and
    ``len(knots) == len(control_points) + 2 * order - 1``.
    """

    control_points: np.ndarray
    knots: KnotVector
    order: int = 4
    weights: np.ndarray = None

    def __post_init__(self):
        P = np.array(self.control_points, dtype=float)
        if P.ndim == 1:
            P = P[:, None]
        kv = _as_knots(self.knots)
        k = int(self.order)
        if k < 2:
            raise InputError("spline order must be at least 2")
        expected = len(kv) - k - (k - 1 if kv.periodic else 0)
        if len(P) != expected:
            raise InputError(f"{len(P)} control points do not match {len(kv)} knots at order {k} "
                             f"(expected {expected})")
        w = np.ones(len(P)) if self.weights is None else np.array(self.weights, dtype=float).ravel()
        if len(w) != len(P):
            raise InputError("weights and control points differ in number")
        if not np.all(w > 0):
            raise InvalidWeightsError("weights must be positive")
        P.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "control_points", P)
        object.__setattr__(self, "knots", kv)
        object.__setattr__(self, "order", k)
        object.__setattr__(self, "weights", w)

    @classmethod
    def closed(cls, control_points, order=4, weights=None):
        P = np.asarray(control_points, dtype=float)
        return cls(P, KnotVector.uniform_periodic(len(P), order), order, weights)

    @property
    def dim(self):
        return self.control_points.shape[1]

    @property
    def periodic(self):
        return self.knots.periodic

    @property
    def domain(self):
        return self.knots.domain(self.order)

    @property
    def uniform_weights(self):
        return bool(np.all(self.weights == self.weights[0]))

    def spans(self):
        return self.knots.spans(self.order)

    def derivatives(self, t, nder=2):
        """Position and derivatives at ``t``: array of shape (nder + 1, m, dim)."""
        k = self.order
        s, vals = local_basis(self.knots, k, t, nder)
        cols = _control_index(self.knots, k, len(self.control_points), s[:, None] - k + 1 + np.arange(k))
        P = self.control_points[cols]
        w = self.weights[cols]
        A = np.einsum("dmk,mkx->dmx", vals * w, P)
        W = np.einsum("dmk,mk->dm", vals, w)
        if np.any(W[0] <= 0):
            raise InvalidWeightsError("rational denominator vanished")
        C0 = A[0] / W[0][:, None]
        out = [C0]
        if nder >= 1:
            C1 = (A[1] - W[1][:, None] * C0) / W[0][:, None]
            out.append(C1)
        if nder >= 2:
            C2 = (A[2] - 2 * W[1][:, None] * C1 - W[2][:, None] * C0) / W[0][:, None]
            out.append(C2)
        return np.stack(out)

    def __call__(self, t):
        pts = self.derivatives(t, 0)[0]
        return pts[0] if np.ndim(t) == 0 else pts

    def transformed(self, A=None, b=None):
        """Curve with control points mapped by ``x -> A x + b``."""
        P = self.control_points
        if A is not None:
            P = P @ np.asarray(A, dtype=float).T
        if b is not None:
            P = P + np.asarray(b, dtype=float)
        return SplineCurve(P, self.knots, self.order, self.weights)


def eval_curve(curve: SplineCurve, t):
    """Point on the curve at ``t`` (array of points for array ``t``)."""
    return curve(t)


def eval_curve_derivatives(curve: SplineCurve, t):
    """``(point, first derivative, second derivative)`` at ``t``."""
    d = curve.derivatives(t, 2)
    if np.ndim(t) == 0:
        return d[0, 0], d[1, 0], d[2, 0]
    return d[0], d[1], d[2]


@dataclass(frozen=True)
class SplineSurface:
    """Tensor-product rational B-spline surface over a rectangular net."""

    control_grid: np.ndarray
    knots_u: KnotVector
    knots_v: KnotVector
    order_u: int = 4
    order_v: int = 4
    weights: np.ndarray = None

    def __post_init__(self):
        G = np.array(self.control_grid, dtype=float)
        if G.ndim != 3:
            raise InputError("control grid must have shape (rows, cols, dim)")
        ku, kv = _as_knots(self.knots_u), _as_knots(self.knots_v)
        for name, knots, k, n in (("u", ku, self.order_u, G.shape[0]), ("v", kv, self.order_v, G.shape[1])):
            expected = len(knots) - k - (k - 1 if knots.periodic else 0)
            if n != expected:
                raise InputError(f"{n} control rows along {name} do not match {len(knots)} knots "
                                 f"at order {k} (expected {expected})")
        w = np.ones(G.shape[:2]) if self.weights is None else np.array(self.weights, dtype=float)
        if w.shape != G.shape[:2]:
            raise InputError(f"weights shape {w.shape} does not match grid {G.shape[:2]}")
        if not np.all(w > 0):
            raise InvalidWeightsError("weights must be positive")
        G.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "control_grid", G)
        object.__setattr__(self, "knots_u", ku)
        object.__setattr__(self, "knots_v", kv)
        object.__setattr__(self, "order_u", int(self.order_u))
        object.__setattr__(self, "order_v", int(self.order_v))
        object.__setattr__(self, "weights", w)

    @property
    def domain(self):
        return self.knots_u.domain(self.order_u), self.knots_v.domain(self.order_v)

    def spans(self):
        return self.knots_u.spans(self.order_u), self.knots_v.spans(self.order_v)

    def partials(self, u, v):
        """All partials up to second order at matching arrays ``u``, ``v``.

        Returns a dict keyed ``S, Su, Sv, Suu, Suv, Svv`` of (m, dim) arrays.
        """
        u = np.atleast_1d(np.asarray(u, dtype=float))
        v = np.atleast_1d(np.asarray(v, dtype=float))
        u, v = np.broadcast_arrays(u, v)
        u, v = u.ravel(), v.ravel()
        ku, kv = self.order_u, self.order_v
        su, Bu = local_basis(self.knots_u, ku, u, 2)
        sv, Bv = local_basis(self.knots_v, kv, v, 2)
        nu, nv = self.control_grid.shape[:2]
        iu = _control_index(self.knots_u, ku, nu, su[:, None] - ku + 1 + np.arange(ku))
        iv = _control_index(self.knots_v, kv, nv, sv[:, None] - kv + 1 + np.arange(kv))
        P = self.control_grid[iu[:, :, None], iv[:, None, :]]
        w = self.weights[iu[:, :, None], iv[:, None, :]]
        Pw = P * w[..., None]

        def A(a, b):
            return np.einsum("mi,mj,mijx->mx", Bu[a], Bv[b], Pw)

        def W(a, b):
            return np.einsum("mi,mj,mij->m", Bu[a], Bv[b], w)[:, None]

        W00 = W(0, 0)
        if np.any(W00 <= 0):
            raise InvalidWeightsError("rational denominator vanished")
        W10, W01, W20, W11, W02 = W(1, 0), W(0, 1), W(2, 0), W(1, 1), W(0, 2)
        S = A(0, 0) / W00
        Su = (A(1, 0) - W10 * S) / W00
        Sv = (A(0, 1) - W01 * S) / W00
        Suu = (A(2, 0) - 2 * W10 * Su - W20 * S) / W00
        Suv = (A(1, 1) - W10 * Sv - W01 * Su - W11 * S) / W00
        Svv = (A(0, 2) - 2 * W01 * Sv - W02 * S) / W00
        return {"S": S, "Su": Su, "Sv": Sv, "Suu": Suu, "Suv": Suv, "Svv": Svv}

    def __call__(self, u, v):
        S = self.partials(u, v)["S"]
        return S[0] if np.ndim(u) == 0 and np.ndim(v) == 0 else S


def eval_surface(surface: SplineSurface, u, v):
    return surface(u, v)


def surface_partials(surface: SplineSurface, u, v):
    """``(S, S_u, S_v, S_uu, S_uv, S_vv)`` at ``(u, v)``."""
    d = surface.partials(u, v)
    scalar = np.ndim(u) == 0 and np.ndim(v) == 0
    keys = ("S", "Su", "Sv", "Suu", "Suv", "Svv")
    return tuple(d[k][0] if scalar else d[k] for k in keys)
