"""Metric tensors in charts and the curvature quantities derived from them.

Index conventions (all arrays are plain numpy):

* ``dg[k, i, j]``        = d_k g_ij
* ``d2g[k, l, i, j]``    = d_k d_l g_ij
* ``christoffel[k, i, j]`` = Gamma^k_ij
* ``riemann[l, k, i, j]`` with (R(X, Y) Z)^l = R[l, k, i, j] Z^k X^i Y^j and
  R(X, Y) = [nabla_X, nabla_Y] - nabla_[X, Y]; the round unit sphere has
  sectional curvature +1 under ``sectional_curvature``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .charts import ChartPoint, DomainError, TangentVector, as_point

__all__ = [
    "DegenerateMetricError",
    "DegeneratePlaneError",
    "MetricField",
    "ScalarField",
    "conformally_flat_metric",
    "euclidean_metric",
    "christoffel",
    "christoffel_derivative",
    "riemann",
    "sectional_curvature",
    "conformal_sectional_curvature",
    "scalar_jet",
    "FD_STEP",
    "FD_STEP2",
    "PLANE_TOL",
]

FD_STEP = 1e-5
FD_STEP2 = 1e-4
PLANE_TOL = 1e-10


class DegenerateMetricError(np.linalg.LinAlgError):
    pass


class DegeneratePlaneError(ValueError):
    pass


def _central_diff(fn, coords: np.ndarray, chart_id: int, h: float) -> np.ndarray:
    """Stack of central differences: out[k] = d fn / d y_k."""
    out = []
    for k in range(coords.shape[0]):
        e = np.zeros_like(coords)
        e[k] = h
        plus = fn(ChartPoint(chart_id, coords + e))
        minus = fn(ChartPoint(chart_id, coords - e))
        out.append((plus - minus) / (2.0 * h))
    return np.array(out)


@dataclass(frozen=True)
class MetricField:
    """A Riemannian metric given chart by chart.

    ``eval`` maps a ChartPoint to the symmetric matrix g_ij.  ``d1`` and ``d2``
    are optional analytic first and second coordinate derivatives; without
    them central differences with ``fd_step`` (first) and ``fd_step2``
    (second) are used.  ``atlas`` is carried along so that curve tools can
    move between charts.
    """

    dim: int
    eval: Callable[[ChartPoint], np.ndarray]
    d1: Optional[Callable[[ChartPoint], np.ndarray]] = None
    d2: Optional[Callable[[ChartPoint], np.ndarray]] = None
    fd_step: float = FD_STEP
    fd_step2: float = FD_STEP2
    atlas: object = None
    name: str = "metric"

    def check_point(self, x: ChartPoint) -> None:
        if x.dim != self.dim:
            raise DomainError(f"point of dimension {x.dim} for a {self.dim}-dimensional metric")
        if self.atlas is not None and not self.atlas.in_domain(x):
            raise DomainError(f"{x!r} outside the chart domain of {self.name}")

    def __call__(self, x) -> np.ndarray:
        x = as_point(x)
        self.check_point(x)
        return np.asarray(self.eval(x), dtype=float)

    def inverse(self, x) -> np.ndarray:
        g = self(x)
        try:
            w = np.linalg.eigvalsh(g)
        except np.linalg.LinAlgError as exc:
            raise DegenerateMetricError(str(exc)) from exc
        if w[0] <= 0.0 or w[0] < 1e-14 * max(abs(w[-1]), 1.0):
            raise DegenerateMetricError(f"degenerate metric at {x!r}: eigenvalues {w}")
        return np.linalg.inv(g)

    def derivative(self, x, analytic: bool = True) -> np.ndarray:
        x = as_point(x)
        self.check_point(x)
        if analytic and self.d1 is not None:
            return np.asarray(self.d1(x), dtype=float)
        return _central_diff(self.eval, x.coords, x.chart_id, self.fd_step)

    def second_derivative(self, x, analytic: bool = True) -> np.ndarray:
        x = as_point(x)
        self.check_point(x)
        if analytic and self.d2 is not None:
            return np.asarray(self.d2(x), dtype=float)
        if analytic and self.d1 is not None:
            d2 = _central_diff(self.d1, x.coords, x.chart_id, self.fd_step)
        else:
            first = lambda p: _central_diff(self.eval, p.coords, p.chart_id, self.fd_step2)
            d2 = _central_diff(first, x.coords, x.chart_id, self.fd_step2)
        return 0.5 * (d2 + d2.transpose(1, 0, 2, 3))

    def inner(self, x, u, v) -> float:
        return float(np.asarray(u) @ self(x) @ np.asarray(v))

    def norm(self, x, u) -> float:
        return float(np.sqrt(max(self.inner(x, u, u), 0.0)))

    def fd_copy(self) -> "MetricField":
        """The same metric with the analytic derivatives switched off."""
        return MetricField(self.dim, self.eval, None, None, self.fd_step, self.fd_step2, self.atlas, self.name + "[fd]")


@dataclass(frozen=True)
class ScalarField:
    """A function on a chart with optional analytic gradient and Hessian (coordinate derivatives)."""

    eval: Callable[[ChartPoint], float]
    grad: Optional[Callable[[ChartPoint], np.ndarray]] = None
    hess: Optional[Callable[[ChartPoint], np.ndarray]] = None
    fd_step: float = FD_STEP
    fd_step2: float = FD_STEP2

    def __call__(self, x) -> float:
        return float(self.eval(as_point(x)))

    def gradient(self, x: ChartPoint) -> np.ndarray:
        if self.grad is not None:
            return np.asarray(self.grad(x), dtype=float)
        f = lambda p: np.asarray(self.eval(p), dtype=float)
        return _central_diff(f, x.coords, x.chart_id, self.fd_step)

    def hessian(self, x: ChartPoint) -> np.ndarray:
        if self.hess is not None:
            return np.asarray(self.hess(x), dtype=float)
        if self.grad is not None:
            H = _central_diff(self.gradient, x.coords, x.chart_id, self.fd_step)
        else:
            f = lambda p: np.asarray(self.eval(p), dtype=float)
            g = lambda p: _central_diff(f, p.coords, p.chart_id, self.fd_step2)
            H = _central_diff(g, x.coords, x.chart_id, self.fd_step2)
        return 0.5 * (H + H.T)


def euclidean_metric(dim: int, atlas=None) -> MetricField:
    from .charts import EuclideanAtlas

    eye = np.eye(dim)
    zero1 = np.zeros((dim, dim, dim))
    zero2 = np.zeros((dim, dim, dim, dim))
    return MetricField(
        dim,
        lambda p: eye,
        lambda p: zero1,
        lambda p: zero2,
        atlas=atlas if atlas is not None else EuclideanAtlas(dim),
        name=f"flat R^{dim}",
    )


def conformally_flat_metric(dim: int, factor: ScalarField, atlas=None, name: str = "conformal") -> MetricField:
    """g_ij = c(y) delta_ij with the derivatives of c taken from ``factor``."""
    eye = np.eye(dim)

    def g(p):
        return factor.eval(p) * eye

    def d1(p):
        return np.einsum("k,ij->kij", factor.gradient(p), eye)

    def d2(p):
        return np.einsum("kl,ij->klij", factor.hessian(p), eye)

    has_d1 = factor.grad is not None
    has_d2 = factor.hess is not None
    return MetricField(dim, g, d1 if has_d1 else None, d2 if has_d2 else None, atlas=atlas, name=name)


def _lowered_christoffel(dg: np.ndarray) -> np.ndarray:
    # [l, i, j] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    return 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)


def christoffel(m: MetricField, x, analytic: bool = True) -> np.ndarray:
    x = as_point(x)
    ginv = m.inverse(x)
    dg = m.derivative(x, analytic=analytic)
    lower = _lowered_christoffel(dg)
    gam = np.einsum("kl,lij->kij", ginv, lower)
    return 0.5 * (gam + gam.transpose(0, 2, 1))


def christoffel_derivative(m: MetricField, x, analytic: bool = True) -> np.ndarray:
    """dGamma[m, k, i, j] = d_m Gamma^k_ij."""
    x = as_point(x)
    ginv = m.inverse(x)
    dg = m.derivative(x, analytic=analytic)
    d2g = m.second_derivative(x, analytic=analytic)
    lower = _lowered_christoffel(dg)
    dlower = 0.5 * (
        np.einsum("mijl->mlij", d2g) + np.einsum("mjil->mlij", d2g) - d2g
    )
    dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)
    return np.einsum("mkl,lij->mkij", dginv, lower) + np.einsum("kl,mlij->mkij", ginv, dlower)


def riemann(m: MetricField, x, analytic: bool = True) -> np.ndarray:
    gam = christoffel(m, x, analytic)
    dgam = christoffel_derivative(m, x, analytic)
    # R[l,k,i,j] = d_i Gam^l_jk - d_j Gam^l_ik + Gam^l_im Gam^m_jk - Gam^l_jm Gam^m_ik
    term = np.einsum("iljk->lkij", dgam)
    R = term - term.transpose(0, 1, 3, 2)
    quad = np.einsum("lim,mjk->lkij", gam, gam)
    return R + quad - quad.transpose(0, 1, 3, 2)


def _components(v) -> np.ndarray:
    if isinstance(v, TangentVector):
        return np.asarray(v.components)
    return np.asarray(v, dtype=float)


def sectional_curvature(m: MetricField, x, v, w, analytic: bool = True) -> float:
    x = as_point(x)
    v = _components(v)
    w = _components(w)
    g = m(x)
    vv, ww, vw = v @ g @ v, w @ g @ w, v @ g @ w
    if vv <= 0.0 or ww <= 0.0:
        raise DegeneratePlaneError("zero vector in plane")
    gram = vv * ww - vw**2
    if gram / (vv * ww) < PLANE_TOL:
        raise DegeneratePlaneError(f"vectors span no plane (normalized Gram determinant {gram / (vv * ww):.3e})")
    R = riemann(m, x, analytic)
    Rvww = np.einsum("lkij,k,i,j->l", R, w, v, w)
    return float(Rvww @ g @ v / gram)


def scalar_jet(m: MetricField, psi: ScalarField, x):
    """(value, coordinate gradient, covariant Hessian) of psi at x w.r.t. m."""
    x = as_point(x)
    d = psi.gradient(x)
    H = psi.hessian(x) - np.einsum("kij,k->ij", christoffel(m, x), d)
    return float(psi.eval(x)), d, H


def conformal_sectional_curvature(K: float, theta: float, grad_psi, hess_psi, v, w, g) -> float:
    """Sectional curvature of theta * g on the plane of the g-orthonormal pair (v, w).

    ``grad_psi`` and ``hess_psi`` are the coordinate gradient and covariant
    Hessian of psi = ln theta; ``g`` is the base metric matrix at the point
    and ``K`` the base sectional curvature of the plane.
    """
    if not theta > 0.0:
        raise ValueError(f"conformal factor must be positive, got {theta}")
    v = _components(v)
    w = _components(w)
    g = np.asarray(g, dtype=float)
    d = np.asarray(grad_psi, dtype=float)
    H = np.asarray(hess_psi, dtype=float)
    gram = np.array([[v @ g @ v, v @ g @ w], [w @ g @ v, w @ g @ w]])
    if np.max(np.abs(gram - np.eye(2))) > 1e-8:
        raise ValueError("the plane basis must be orthonormal for the base metric")
    grad_sq = float(d @ np.linalg.solve(g, d))
    v_psi, w_psi = float(v @ d), float(w @ d)
    bracket = v @ H @ v + w @ H @ w + 0.5 * (grad_sq - v_psi**2 - w_psi**2)
    return float((K - 0.5 * bracket) / theta)
