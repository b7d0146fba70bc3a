"""Vector fields in charts and the Killing equation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .charts import ChartPoint, TangentVector, as_point
from .metric import FD_STEP, MetricField, _central_diff, christoffel

__all__ = [
    "VectorField",
    "lie_derivative_metric",
    "covariant_killing_form",
    "linear_field",
    "sphere_linear_field",
]


@dataclass(frozen=True)
class VectorField:
    """Components of a vector field in the chart of the point it is evaluated at.

    ``jac`` (optional) returns J[k, i] = d_i X^k; otherwise central
    differences with ``fd_step`` are used.
    """

    eval: Callable[[ChartPoint], np.ndarray]
    jac: Optional[Callable[[ChartPoint], np.ndarray]] = None
    fd_step: float = FD_STEP
    atlas: object = None
    name: str = "field"

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.eval(as_point(x)), dtype=float)

    def at(self, x) -> TangentVector:
        x = as_point(x)
        return TangentVector(x, self(x))

    def jacobian(self, x, analytic: bool = True) -> np.ndarray:
        x = as_point(x)
        if analytic and self.jac is not None:
            return np.asarray(self.jac(x), dtype=float)
        return _central_diff(self.__call__, x.coords, x.chart_id, self.fd_step).T

    def scaled(self, c: float, name: str | None = None) -> "VectorField":
        jac = None if self.jac is None else (lambda p: c * self.jac(p))
        return VectorField(lambda p: c * self.eval(p), jac, self.fd_step, self.atlas, name or f"{c}*{self.name}")

    def fd_copy(self) -> "VectorField":
        return VectorField(self.eval, None, self.fd_step, self.atlas, self.name + "[fd]")


def lie_derivative_metric(m: MetricField, X: VectorField, x, analytic: bool = True) -> np.ndarray:
    """(L_X g)_ij = X^k d_k g_ij + g_kj d_i X^k + g_ik d_j X^k at x."""
    x = as_point(x)
    g = m(x)
    dg = m.derivative(x, analytic=analytic)
    X0 = X(x)
    J = X.jacobian(x, analytic=analytic)
    L = np.einsum("k,kij->ij", X0, dg) + J.T @ g + g @ J
    return 0.5 * (L + L.T)


def covariant_killing_form(m: MetricField, X: VectorField, x, analytic: bool = True) -> np.ndarray:
    """xi_{i;j} + xi_{j;i} for the lowered field xi = g(X, .)."""
    x = as_point(x)
    g = m(x)
    dg = m.derivative(x, analytic=analytic)
    X0 = X(x)
    J = X.jacobian(x, analytic=analytic)
    gam = christoffel(m, x, analytic)
    # d_j xi_i = d_j g_ik X^k + g_ik d_j X^k
    dxi = np.einsum("jik,k->ij", dg, X0) + g @ J
    nabla = dxi - np.einsum("kij,k->ij", gam, g @ X0)
    return nabla + nabla.T


def linear_field(W, w=None, atlas=None, name: str = "linear") -> VectorField:
    """X(x) = W x + w on a single Euclidean chart."""
    W = np.asarray(W, dtype=float)
    w = np.zeros(W.shape[0]) if w is None else np.asarray(w, dtype=float)
    return VectorField(lambda p: W @ p.coords + w, lambda p: W, atlas=atlas, name=name)


def sphere_linear_field(atlas, L, name: str = "linear") -> VectorField:
    """Chart expression of the ambient linear field x -> L x restricted to the sphere.

    ``L`` should be skew-symmetric (the field is then tangent to the sphere);
    the Jacobian in chart coordinates is written out analytically.
    """
    L = np.asarray(L, dtype=float)

    def ev(p):
        x = atlas.to_ambient(p)
        return atlas.chart_differential(x, L @ x, p.chart_id)

    def jac(p):
        x = atlas.to_ambient(p)
        DP = atlas.ambient_jacobian(p)
        Lx = L @ x
        cols = [
            atlas.chart_second_differential(x, DP[:, j], Lx, p.chart_id)
            + atlas.chart_differential(x, L @ DP[:, j], p.chart_id)
            for j in range(atlas.dim)
        ]
        return np.array(cols).T

    return VectorField(ev, jac, atlas=atlas, name=name)
