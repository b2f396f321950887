"""Curvature of spline curves and surfaces, and the shape-score integrals.

Mean curvature follows the convention H = (k1 + k2) / 2, so the integrand
of the surface score, (k1**2 + k2**2) / 2, equals 2 H**2 - K.  Integrals are
composite Gauss-Legendre rules applied span by span; the error estimate is
the change observed when the rule order is doubled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Sequence

import numpy as np

from .errors import DimensionError, SingularPointError
from .spline import SplineCurve, SplineSurface

DEFAULT_QUADRATURE = 16


@lru_cache(maxsize=None)
def gauss_legendre(order):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _nodes(spans, order):
    """Map Gauss-Legendre nodes onto every span; returns (nodes, weights)."""
    x, w = gauss_legendre(order)
    lo, hi = spans[:, :1], spans[:, 1:]
    half = (hi - lo) / 2
    return (lo + half * (x + 1)).ravel(), (half * w).ravel()


@dataclass(frozen=True)
class FundamentalForms:
    E: float
    F: float
    G: float
    L: float
    M: float
    N: float
    normal: np.ndarray

    @property
    def first(self):
        return np.array([[self.E, self.F], [self.F, self.G]])

    @property
    def second(self):
        return np.array([[self.L, self.M], [self.M, self.N]])


@dataclass(frozen=True)
class CurvatureSample:
    K: float
    H: float
    kappa1: float
    kappa2: float


@dataclass
class ShapeScore:
    value: float
    contributions: List[float]
    diagnostics: dict = field(default_factory=dict)

    @property
    def error_estimate(self):
        return self.diagnostics.get("error_estimate", 0.0)


def _curve_kappa(d1, d2):
    speed = np.linalg.norm(d1, axis=1)
    if d1.shape[1] == 2:
        cross = np.abs(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    else:
        cross = np.linalg.norm(np.cross(d1, d2), axis=1)
    return speed, cross


def plane_curvature(curve: SplineCurve, t):
    """Unsigned curvature |x'y'' - y'x''| / |r'|^3 at ``t`` (scalar or array)."""
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    d = curve.derivatives(tt, 2)
    speed, cross = _curve_kappa(d[1], d[2])
    bad = speed <= np.finfo(float).tiny
    if bad.any():
        loc = float(tt[np.argmax(bad)])
        raise SingularPointError(f"zero speed at t={loc}", location=loc)
    kappa = cross / speed ** 3
    return float(kappa[0]) if np.ndim(t) == 0 else kappa


def _curve_integral(curve, order):
    t, w = _nodes(curve.spans(), order)
    d = curve.derivatives(t, 2)
    speed, cross = _curve_kappa(d[1], d[2])
    bad = speed <= np.finfo(float).tiny
    if bad.any():
        loc = float(t[np.argmax(bad)])
        raise SingularPointError(f"zero speed at t={loc}", location=loc)
    # kappa**2 * speed
    return float(np.dot(w, cross ** 2 / speed ** 5))


def shape_score_curve(loops, order=DEFAULT_QUADRATURE) -> ShapeScore:
    """Integral of squared curvature against arc length, summed over loops.

    ``loops`` is a :class:`SplineCurve` or a sequence of them.  The
    diagnostics carry the rule order and an error estimate obtained by
    re-integrating with twice as many nodes per span.
    """
    if isinstance(loops, SplineCurve):
        loops = [loops]
    contributions, errors = [], []
    for curve in loops:
        coarse = _curve_integral(curve, order)
        fine = _curve_integral(curve, 2 * order)
        contributions.append(coarse)
        errors.append(abs(fine - coarse))
    return ShapeScore(float(sum(contributions)), contributions,
                      {"order": order, "error_estimate": float(sum(errors)),
                       "per_loop_error": errors})


def _forms_from_partials(d):
    Su, Sv = d["Su"], d["Sv"]
    cross = np.cross(Su, Sv)
    norm = np.linalg.norm(cross, axis=1)
    scale = np.linalg.norm(Su, axis=1) * np.linalg.norm(Sv, axis=1)
    singular = norm <= 1e-12 * scale
    safe = np.where(singular, 1.0, norm)
    n = cross / safe[:, None]
    E = np.einsum("ij,ij->i", Su, Su)
    F = np.einsum("ij,ij->i", Su, Sv)
    G = np.einsum("ij,ij->i", Sv, Sv)
    L = np.einsum("ij,ij->i", d["Suu"], n)
    M = np.einsum("ij,ij->i", d["Suv"], n)
    N = np.einsum("ij,ij->i", d["Svv"], n)
    return E, F, G, L, M, N, n, singular


def fundamental_forms(surface: SplineSurface, u, v) -> FundamentalForms:
    """First and second fundamental forms at one parameter pair."""
    d = surface.partials(float(u), float(v))
    if d["S"].shape[1] != 3:
        raise DimensionError("fundamental forms need a surface in 3D")
    E, F, G, L, M, N, n, singular = _forms_from_partials(d)
    if singular[0]:
        raise SingularPointError(f"degenerate tangent plane at (u, v)=({u}, {v})", location=(u, v))
    return FundamentalForms(float(E[0]), float(F[0]), float(G[0]),
                            float(L[0]), float(M[0]), float(N[0]), n[0])


def _KH(E, F, G, L, M, N):
    det1 = E * G - F * F
    K = (L * N - M * M) / det1
    H = (E * N - 2 * F * M + G * L) / (2 * det1)
    return K, H


def _check_forms(f):
    if not (f.E * f.G - f.F * f.F) > 0:
        raise SingularPointError("first fundamental form is not positive definite")


def gaussian_mean(forms: FundamentalForms):
    """(K, H) with K = det(II)/det(I) and H = tr(II I^-1) / 2."""
    _check_forms(forms)
    K, H = _KH(forms.E, forms.F, forms.G, forms.L, forms.M, forms.N)
    return float(K), float(H)


def principal_curvatures(forms: FundamentalForms):
    """Roots of det(II - kappa I) = 0, largest first."""
    _check_forms(forms)
    shape_op = np.linalg.solve(forms.first, forms.second)
    k = np.sort(np.linalg.eigvals(shape_op).real)[::-1]
    return float(k[0]), float(k[1])


def curvature_sample(forms: FundamentalForms) -> CurvatureSample:
    K, H = gaussian_mean(forms)
    k1, k2 = principal_curvatures(forms)
    return CurvatureSample(K, H, k1, k2)


def monge_curvatures(fu, fv, fuu, fuv, fvv):
    """(K, H) of the graph z = f(u, v) from the partials of f.

    Used as an independent check of the fundamental-form route.
    """
    g = 1.0 + fu * fu + fv * fv
    K = (fuu * fvv - fuv * fuv) / g ** 2
    H = ((1 + fv * fv) * fuu - 2 * fu * fv * fuv + (1 + fu * fu) * fvv) / (2 * g ** 1.5)
    return K, H


def _surface_integral(surface, order, domain):
    spans_u, spans_v = surface.spans()
    if domain is not None:
        (ua, ub), (va, vb) = domain
        spans_u = _clip_spans(spans_u, ua, ub)
        spans_v = _clip_spans(spans_v, va, vb)
    u, wu = _nodes(spans_u, order)
    v, wv = _nodes(spans_v, order)
    U, V = np.meshgrid(u, v, indexing="ij")
    W = np.outer(wu, wv).ravel()
    d = surface.partials(U.ravel(), V.ravel())
    E, F, G, L, M, N, _, singular = _forms_from_partials(d)
    det1 = E * G - F * F
    ok = ~singular & (det1 > 0)
    K, H = _KH(E[ok], F[ok], G[ok], L[ok], M[ok], N[ok])
    integrand = (2 * H * H - K) * np.sqrt(det1[ok])
    bad = np.column_stack([U.ravel()[~ok], V.ravel()[~ok]])
    return float(np.dot(W[ok], integrand)), bad


def _clip_spans(spans, a, b):
    lo = np.clip(spans[:, 0], a, b)
    hi = np.clip(spans[:, 1], a, b)
    keep = hi > lo
    return np.column_stack([lo[keep], hi[keep]])


def shape_score_surface(surface: SplineSurface, domain=None, order=DEFAULT_QUADRATURE) -> ShapeScore:
    """Half the integral of k1**2 + k2**2 over the surface area.

    ``domain`` is ``((u0, u1), (v0, v1))``; default is the full parameter
    domain.  Quadrature nodes where the tangent plane degenerates are left
    out, listed in ``diagnostics["singular_points"]`` and the score is
    flagged unreliable.
    """
    coarse, bad = _surface_integral(surface, order, domain)
    fine, bad2 = _surface_integral(surface, 2 * order, domain)
    reliable = len(bad) == 0 and len(bad2) == 0
    return ShapeScore(coarse, [coarse], {
        "order": order,
        "error_estimate": abs(fine - coarse),
        "reliable": reliable,
        "singular_points": bad.tolist(),
    })


def shape_score_surfaces(patches: Sequence[SplineSurface], order=DEFAULT_QUADRATURE) -> ShapeScore:
    """Score of a surface assembled from several patches."""
    parts = [shape_score_surface(p, order=order) for p in patches]
    return ShapeScore(float(sum(p.value for p in parts)), [p.value for p in parts], {
        "order": order,
        "error_estimate": float(sum(p.error_estimate for p in parts)),
        "reliable": all(p.diagnostics["reliable"] for p in parts),
        "singular_points": [q for p in parts for q in p.diagnostics["singular_points"]],
    })
